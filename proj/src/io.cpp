#include "nls/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace nls {

std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

void export_matrix_market(const CSR& a, std::ostream& os) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    int nnz = a.rowptr[a.n];
    os << a.n << " " << a.m << " " << nnz << "\n";
    for (int i = 0; i < a.n; ++i)
        for (int k = a.rowptr[i]; k < a.rowptr[i + 1]; ++k)
            os << (i + 1) << " " << (a.col[k] + 1) << " " << format_double(a.val[k]) << "\n";
}

void export_trace_csv(const IterationTrace& trace, std::ostream& os,
                      const std::vector<std::string>& header_notes) {
    for (const auto& n : header_notes) os << "# " << n << "\n";
    os << "iteration,residual\n";
    for (size_t k = 0; k < trace.residuals.size(); ++k)
        os << k << "," << format_double(trace.residuals[k]) << "\n";
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r\n");
        size_t b = s.find_last_not_of(" \t\r\n");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) out[key] = val;
    }
    return out;
}

}  // namespace nls
