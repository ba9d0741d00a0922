#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gridecon/calendar.hpp"
#include "gridecon/money.hpp"

namespace gridecon::sim {

using econ::Money;
using econ::SimTime;

// One line of the append-only audit trail. Optional fields render empty in
// CSV and null-omitted in JSON lines.
struct TraceRecord {
    SimTime at = 0;
    std::string actor;
    std::string kind;
    std::string resource;
    std::string job;
    std::optional<std::int64_t> amount;
    std::string detail;
};

class Trace {
public:
    void append(TraceRecord rec);
    const std::vector<TraceRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    // header: time,actor,kind,resource,job,amount,detail
    void write_csv(std::ostream& out) const;
    // JSON lines with the same field names as the CSV columns.
    void write_jsonl(std::ostream& out) const;

    std::string csv_string() const;
    std::string jsonl_string() const;

private:
    std::vector<TraceRecord> records_;
};

}  // namespace gridecon::sim
