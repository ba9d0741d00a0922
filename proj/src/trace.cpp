#include "gridecon/trace.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gridecon::sim {

namespace {

// Quote only when the value needs it; keeps golden traces readable.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

void Trace::append(TraceRecord rec) {
    if (!records_.empty() && rec.at < records_.back().at)
        throw std::logic_error("trace: record time went backwards");
    records_.push_back(std::move(rec));
}

void Trace::write_csv(std::ostream& out) const {
    out << "time,actor,kind,resource,job,amount,detail\n";
    for (const auto& r : records_) {
        out << r.at << ',' << csv_field(r.actor) << ',' << csv_field(r.kind) << ','
            << csv_field(r.resource) << ',' << csv_field(r.job) << ',';
        if (r.amount) out << *r.amount;
        out << ',' << csv_field(r.detail) << '\n';
    }
}

void Trace::write_jsonl(std::ostream& out) const {
    for (const auto& r : records_) {
        nlohmann::json j;
        j["time"] = r.at;
        j["actor"] = r.actor;
        j["kind"] = r.kind;
        j["resource"] = r.resource;
        j["job"] = r.job;
        if (r.amount) j["amount"] = *r.amount;
        j["detail"] = r.detail;
        out << j.dump() << '\n';
    }
}

std::string Trace::csv_string() const {
    std::ostringstream ss;
    write_csv(ss);
    return ss.str();
}

std::string Trace::jsonl_string() const {
    std::ostringstream ss;
    write_jsonl(ss);
    return ss.str();
}

}  // namespace gridecon::sim
