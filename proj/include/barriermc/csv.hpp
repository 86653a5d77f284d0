#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace barriermc {

// CSV emission with a leading comment block carrying the resolved config, so
// every row is re-runnable from the file alone.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
            out_ = &file_;
        } else {
            out_ = &std::cout;
        }
    }

    void comment(const std::string& line) { *out_ << "# " << line << "\n"; }

    void header(const std::vector<std::string>& cols) { write_row(cols); }

    void row(const std::vector<std::string>& cols) { write_row(cols); }

    static std::string num(double v) {
        std::ostringstream ss;
        ss.precision(17);
        ss << v;
        return ss.str();
    }

private:
    void write_row(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) *out_ << ',';
            *out_ << cols[i];
        }
        *out_ << '\n';
    }

    std::ofstream file_;
    std::ostream* out_ = nullptr;
};

}  // namespace barriermc
