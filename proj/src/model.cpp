#include "machmin/model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace machmin {

void check_job(const Job& job)
{
    if (job.id < 0)
        throw std::invalid_argument("negative job id " + std::to_string(job.id));
    if (job.release < 0)
        throw std::invalid_argument("job " + std::to_string(job.id) + ": negative release");
    if (job.processing < 1)
        throw std::invalid_argument("job " + std::to_string(job.id) + ": processing < 1");
    if (job.deadline < job.release + job.processing)
        throw std::invalid_argument("job " + std::to_string(job.id) +
                                    ": deadline < release + processing");
}

Instance::Instance(std::vector<Job> jobs) : jobs_(std::move(jobs))
{
    index_.reserve(jobs_.size());
    for (std::size_t i = 0; i < jobs_.size(); ++i) {
        check_job(jobs_[i]);
        if (!index_.emplace(jobs_[i].id, i).second)
            throw std::invalid_argument("duplicate job id " + std::to_string(jobs_[i].id));
    }
}

const Job& Instance::by_id(JobId id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        throw std::out_of_range("unknown job id " + std::to_string(id));
    return jobs_[it->second];
}

std::optional<std::size_t> Instance::index_of(JobId id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

Time Instance::max_deadline() const
{
    Time d = 0;
    for (const auto& j : jobs_)
        d = std::max(d, j.deadline);
    return d;
}

Time Instance::total_processing() const
{
    return std::accumulate(jobs_.begin(), jobs_.end(), Time{0},
                           [](Time acc, const Job& j) { return acc + j.processing; });
}

bool Instance::is_agreeable() const
{
    auto order = jobs_;
    std::sort(order.begin(), order.end(), [](const Job& a, const Job& b) {
        return std::tie(a.release, a.deadline) < std::tie(b.release, b.deadline);
    });
    // r_j < r_k must imply d_j <= d_k; equal releases may carry any deadlines.
    Time max_deadline_before = std::numeric_limits<Time>::min();
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t k = i;
        Time group_max = order[i].deadline;
        while (k < order.size() && order[k].release == order[i].release) {
            if (order[k].deadline < max_deadline_before)
                return false;
            group_max = std::max(group_max, order[k].deadline);
            ++k;
        }
        max_deadline_before = std::max(max_deadline_before, group_max);
        i = k;
    }
    return true;
}

bool Instance::is_equal_processing() const
{
    return std::all_of(jobs_.begin(), jobs_.end(),
                       [&](const Job& j) { return j.processing == jobs_.front().processing; });
}

bool Instance::is_uniform_deadline() const
{
    return std::all_of(jobs_.begin(), jobs_.end(),
                       [&](const Job& j) { return j.deadline == jobs_.front().deadline; });
}

Instance Instance::released_by(Time t) const
{
    std::vector<Job> out;
    for (const auto& j : jobs_)
        if (j.release <= t)
            out.push_back(j);
    return Instance(std::move(out));
}

Instance Instance::scaled(Time factor) const
{
    auto out = jobs_;
    for (auto& j : out) {
        j.release *= factor;
        j.deadline *= factor;
        j.processing *= factor;
    }
    return Instance(std::move(out));
}

Time laxity(const JobState& state, Time t)
{
    return state.job.deadline - t - state.remaining;
}

Tightness classify(const JobState& state, Time /*t*/, const Rational& alpha)
{
    // remaining <= alpha * window  <=>  remaining * den <= num * window
    const auto window = state.job.window();
    const bool loose =
        state.remaining * alpha.denominator() <= alpha.numerator() * window;
    return loose ? Tightness::Loose : Tightness::Tight;
}

Tightness classify(const Job& job, const Rational& alpha)
{
    return classify(JobState{job, job.processing, false}, job.release, alpha);
}

int PreemptiveSchedule::machines_used() const
{
    std::size_t peak = 0;
    for (const auto& [t, ids] : slots)
        peak = std::max(peak, ids.size());
    return static_cast<int>(peak);
}

int NonpreemptiveSchedule::machines_used(const Instance& instance) const
{
    std::vector<std::pair<Time, int>> events;
    for (const auto& [id, s] : starts) {
        auto idx = instance.index_of(id);
        if (!idx)
            continue;
        events.emplace_back(s, +1);
        events.emplace_back(s + instance[*idx].processing, -1);
    }
    // Ends sort before starts at equal times: [s, s+p) is half-open.
    std::sort(events.begin(), events.end());
    int cur = 0;
    int peak = 0;
    for (const auto& [t, delta] : events) {
        cur += delta;
        peak = std::max(peak, cur);
    }
    return peak;
}

const JobDiagnostic* ValidationReport::find(JobId id) const
{
    for (const auto& d : jobs)
        if (d.id == id)
            return &d;
    return nullptr;
}

std::string ValidationReport::summary() const
{
    std::ostringstream os;
    os << (feasible ? "feasible" : "infeasible") << " machines_used=" << machines_used << "\n";
    for (const auto& e : structural_errors)
        os << "error: " << e << "\n";
    for (const auto& d : jobs)
        if (!d.ok)
            os << "job " << d.id << ": " << d.message << "\n";
    return os.str();
}

ValidationReport validate_preemptive(const Instance& instance, const PreemptiveSchedule& schedule)
{
    ValidationReport report;
    std::vector<JobDiagnostic> diag(instance.size());
    for (std::size_t i = 0; i < instance.size(); ++i) {
        diag[i].id = instance[i].id;
        diag[i].required = instance[i].processing;
    }
    for (const auto& [t, ids] : schedule.slots) {
        std::set<JobId> seen;
        for (JobId id : ids) {
            auto idx = instance.index_of(id);
            if (!idx) {
                report.structural_errors.push_back("unknown job id " + std::to_string(id) +
                                                   " in slot " + std::to_string(t));
                continue;
            }
            auto& d = diag[*idx];
            if (!seen.insert(id).second) {
                d.duplicate_slots.push_back(t);
                continue;
            }
            const auto& job = instance[*idx];
            if (t < job.release || t >= job.deadline)
                d.outside_window.push_back(t);
            else
                ++d.assigned;
        }
    }
    for (auto& d : diag) {
        std::ostringstream msg;
        if (!d.outside_window.empty()) {
            msg << "slot " << d.outside_window.front() << " outside window; ";
            d.ok = false;
        }
        if (!d.duplicate_slots.empty()) {
            msg << "processed twice in slot " << d.duplicate_slots.front() << "; ";
            d.ok = false;
        }
        if (d.assigned != d.required) {
            msg << d.assigned << " of " << d.required << " units";
            d.ok = false;
        }
        d.message = msg.str();
        if (!d.ok)
            report.feasible = false;
    }
    if (!report.structural_errors.empty())
        report.feasible = false;
    report.jobs = std::move(diag);
    report.machines_used = schedule.machines_used();
    return report;
}

ValidationReport validate_nonpreemptive(const Instance& instance,
                                        const NonpreemptiveSchedule& schedule)
{
    ValidationReport report;
    for (const auto& [id, s] : schedule.starts)
        if (!instance.contains(id))
            report.structural_errors.push_back("unknown job id " + std::to_string(id));
    for (const auto& job : instance.jobs()) {
        JobDiagnostic d;
        d.id = job.id;
        d.required = job.processing;
        auto it = schedule.starts.find(job.id);
        if (it == schedule.starts.end()) {
            d.ok = false;
            d.message = "no start time";
        } else {
            d.start = it->second;
            d.assigned = job.processing;
            if (it->second < job.release) {
                d.ok = false;
                d.message = "starts at " + std::to_string(it->second) + " before release " +
                            std::to_string(job.release);
            } else if (it->second + job.processing > job.deadline) {
                d.ok = false;
                d.message = "ends at " + std::to_string(it->second + job.processing) +
                            " after deadline " + std::to_string(job.deadline);
            }
        }
        if (!d.ok)
            report.feasible = false;
        report.jobs.push_back(std::move(d));
    }
    if (!report.structural_errors.empty())
        report.feasible = false;
    report.machines_used = schedule.machines_used(instance);
    return report;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto sp = line.find(' ', pos);
        out.push_back(line.substr(pos, sp == std::string_view::npos ? sp : sp - pos));
        if (sp == std::string_view::npos)
            break;
        pos = sp + 1;
    }
    return out;
}

std::int64_t parse_field(std::string_view field, std::size_t line)
{
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(line, "malformed integer '" + std::string(field) + "'");
    return v;
}

}  // namespace

Instance parse_instance(std::string_view text)
{
    auto lines = split_lines(text);
    if (lines.empty())
        throw ParseError(1, "missing header");
    auto header = split_fields(lines[0]);
    if (header.size() != 3 || header[0] != "machmin" || header[1] != "v1")
        throw ParseError(1, "expected header 'machmin v1 <n>'");
    const auto n = parse_field(header[2], 1);
    if (n < 0)
        throw ParseError(1, "negative job count");
    if (static_cast<std::size_t>(n) + 1 > lines.size())
        throw ParseError(lines.size() + 1, "expected " + std::to_string(n) + " job rows");
    for (std::size_t i = static_cast<std::size_t>(n) + 1; i < lines.size(); ++i)
        if (!lines[i].empty())
            throw ParseError(i + 1, "unexpected trailing content");

    std::vector<Job> jobs;
    std::set<JobId> ids;
    for (std::size_t i = 1; i <= static_cast<std::size_t>(n); ++i) {
        const auto line_no = i + 1;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 4)
            throw ParseError(line_no, "expected '<id> <r> <d> <p>'");
        Job job{parse_field(fields[0], line_no), parse_field(fields[1], line_no),
                parse_field(fields[2], line_no), parse_field(fields[3], line_no)};
        if (job.id < 0)
            throw ParseError(line_no, "negative job id");
        if (job.release < 0)
            throw ParseError(line_no, "negative release");
        if (job.processing < 1)
            throw ParseError(line_no, "processing < 1");
        if (job.deadline < job.release + job.processing)
            throw ParseError(line_no, "deadline < release + processing");
        if (!ids.insert(job.id).second)
            throw ParseError(line_no, "duplicate id " + std::to_string(job.id));
        jobs.push_back(job);
    }
    return Instance(std::move(jobs));
}

std::string serialize_instance(const Instance& instance)
{
    std::ostringstream os;
    os << "machmin v1 " << instance.size() << "\n";
    for (const auto& j : instance.jobs())
        os << j.id << " " << j.release << " " << j.deadline << " " << j.processing << "\n";
    return os.str();
}

Instance read_instance_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

Trace parse_trace(std::string_view text)
{
    auto lines = split_lines(text);
    if (lines.empty())
        throw ParseError(1, "missing trace header");
    Trace trace;
    if (lines[0] == "trace preemptive")
        trace.preemptive = true;
    else if (lines[0] == "trace nonpreemptive")
        trace.preemptive = false;
    else
        throw ParseError(1, "expected 'trace preemptive|nonpreemptive'");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        auto fields = split_fields(lines[i]);
        if (fields.size() != 2)
            throw ParseError(i + 1, "expected two fields");
        auto a = parse_field(fields[0], i + 1);
        auto b = parse_field(fields[1], i + 1);
        if (trace.preemptive) {
            trace.preemptive_schedule.assign(a, b);
        } else if (!trace.nonpreemptive_schedule.starts.emplace(a, b).second) {
            throw ParseError(i + 1, "duplicate start for job " + std::to_string(a));
        }
    }
    return trace;
}

std::string serialize_trace(const PreemptiveSchedule& schedule)
{
    std::ostringstream os;
    os << "trace preemptive\n";
    for (const auto& [t, ids] : schedule.slots) {
        auto sorted = ids;
        std::sort(sorted.begin(), sorted.end());
        for (JobId id : sorted)
            os << t << " " << id << "\n";
    }
    return os.str();
}

std::string serialize_trace(const NonpreemptiveSchedule& schedule)
{
    std::ostringstream os;
    os << "trace nonpreemptive\n";
    for (const auto& [id, s] : schedule.starts)
        os << id << " " << s << "\n";
    return os.str();
}

}  // namespace machmin
