#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace coopeq {

// 17 significant digits: enough for bit-faithful double round trips.
std::string format_g17(double v);

// 1-based action indices joined with '|'.
std::string join_assignment(const std::vector<int>& x);

// One CSV row of the per-iteration trace. Fields that do not apply to the
// engine that produced the row are left empty.
struct TraceRow {
    int iter = 0;
    std::string engine;
    std::optional<double> max_delta;
    std::optional<double> max_nash_gap;
    std::optional<double> bound_max;
    std::optional<bool> consensus;
    std::optional<double> best_value;
    std::optional<std::vector<int>> best_assignment;
};

class TraceWriter {
public:
    explicit TraceWriter(const std::string& path);
    void write(const TraceRow& row);
    void close();

private:
    std::ofstream out_;
};

}  // namespace coopeq
