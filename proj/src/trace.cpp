#include "coopeq/trace.hpp"

#include <cstdio>

#include "coopeq/errors.hpp"

namespace coopeq {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_assignment(const std::vector<int>& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i > 0) s += '|';
        s += std::to_string(x[i] + 1);
    }
    return s;
}

TraceWriter::TraceWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw InputError("cannot open trace file: " + path);
    out_ << "iter,engine,max_delta,max_nash_gap,bound_max,consensus,best_value,best_assignment\n";
}

void TraceWriter::write(const TraceRow& row) {
    out_ << row.iter << ',' << row.engine << ',';
    if (row.max_delta) out_ << format_g17(*row.max_delta);
    out_ << ',';
    if (row.max_nash_gap) out_ << format_g17(*row.max_nash_gap);
    out_ << ',';
    if (row.bound_max) out_ << format_g17(*row.bound_max);
    out_ << ',';
    if (row.consensus) out_ << (*row.consensus ? '1' : '0');
    out_ << ',';
    if (row.best_value) out_ << format_g17(*row.best_value);
    out_ << ',';
    if (row.best_assignment) out_ << join_assignment(*row.best_assignment);
    out_ << '\n';
}

void TraceWriter::close() {
    if (out_.is_open()) {
        out_.flush();
        out_.close();
        if (!out_) throw InputError("failed to write trace file");
    }
}

}  // namespace coopeq
