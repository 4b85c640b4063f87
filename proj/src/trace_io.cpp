#include "mviopt/trace_io.hpp"

#include <cstdio>
#include <cstdint>
#include <fstream>
#include <string>

namespace mviopt {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trace_to_csv(const SolverTrace& trace, bool timings) {
    std::string out =
        "iter,lambda_i,omega_step,oracle_delta,inner_iters,gap_estimate,"
        "cumulative_oracle_calls,wall_time_ms\r\n";
    long long cumulative = 0;
    for (const auto& rec : trace.records) {
        cumulative += rec.inner_iterations;
        out += std::to_string(rec.iter);
        out += ',';
        out += format_g17(rec.lambda);
        out += ',';
        out += format_g17(rec.omega_step);
        out += ',';
        out += format_g17(rec.oracle_delta);
        out += ',';
        out += std::to_string(rec.inner_iterations);
        out += ',';
        out += format_g17(rec.gap_estimate);
        out += ',';
        out += std::to_string(cumulative);
        out += ',';
        out += timings ? format_g17(rec.wall_ms) : std::string("0");
        out += "\r\n";
    }
    return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open for writing: " + tmp);
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mviopt
