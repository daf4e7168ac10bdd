#pragma once
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dsm/errors.hpp"

namespace dsmcli {

// CSV with a single comment header recording config hash and seed; bodies are
// reproducible byte for byte (no timestamps, fixed %.17g formatting).
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::uint64_t config_hash, std::uint64_t seed,
              const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw dsm::ConfigError("cannot open output file: " + path);
        char head[96];
        std::snprintf(head, sizeof head, "# config_hash=%016llx seed=%llu\n",
                      static_cast<unsigned long long>(config_hash),
                      static_cast<unsigned long long>(seed));
        out_ << head;
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }

    void row(const std::vector<double>& values) {
        char buf[40];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", values[i]);
            out_ << buf << (i + 1 < values.size() ? "," : "\n");
        }
    }

    // first cell printed as an integer (iteration counters, level indices)
    void row_int_first(long long first, const std::vector<double>& rest) {
        out_ << first;
        char buf[40];
        for (double v : rest) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out_ << buf;
        }
        out_ << "\n";
    }

    void row_raw(const std::string& line) { out_ << line << "\n"; }

private:
    std::ofstream out_;
};

}  // namespace dsmcli
