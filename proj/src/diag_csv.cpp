#include "nls/diag_csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "nls/errors.hpp"

namespace nls {

namespace {

const char* kAxisSuffix[3] = {"_x", "_y", "_z"};

std::string fmt(double v) {
    if (!std::isfinite(v)) throw IoError(IoError::Kind::other, "diagnostics: non-finite value");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string diagnostics_header(int dim) {
    std::string h = "t,mass,energy";
    for (int a = 0; a < dim; ++a) h += std::string(",momentum") + kAxisSuffix[a];
    h += ",variance,grad_sq,linf,lambda";
    for (int a = 0; a < dim; ++a) h += std::string(",x_center") + kAxisSuffix[a];
    for (int a = 0; a < dim; ++a) h += std::string(",xi") + kAxisSuffix[a];
    h += ",gamma,spacetime_norm_partial,morawetz_value,fit_distance";
    return h;
}

void write_diagnostics(const std::vector<DiagnosticRecord>& records, const std::string& path,
                       int dim) {
    if (dim < 1 || dim > 3) throw ArgumentError("diagnostics: dimension must be 1..3");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(IoError::Kind::write_failure, "diagnostics: cannot open " + path);
    out << "# schema: nlslab-diagnostics-v1\n";
    out << diagnostics_header(dim) << "\n";
    for (const DiagnosticRecord& r : records) {
        std::string line = fmt(r.t) + "," + fmt(r.mass) + "," + fmt(r.energy);
        for (int a = 0; a < dim; ++a) line += "," + fmt(r.momentum[static_cast<std::size_t>(a)]);
        line += "," + fmt(r.variance) + "," + fmt(r.grad_sq) + "," + fmt(r.linf);
        line += ",";
        if (r.lambda) line += fmt(*r.lambda);
        for (int a = 0; a < dim; ++a) {
            line += ",";
            if (r.x_center) line += fmt((*r.x_center)[static_cast<std::size_t>(a)]);
        }
        for (int a = 0; a < dim; ++a) {
            line += ",";
            if (r.xi) line += fmt((*r.xi)[static_cast<std::size_t>(a)]);
        }
        line += ",";
        if (r.gamma) line += fmt(*r.gamma);
        line += "," + fmt(r.spacetime_norm_partial);
        line += ",";
        if (r.morawetz_value) line += fmt(*r.morawetz_value);
        line += ",";
        if (r.fit_distance) line += fmt(*r.fit_distance);
        out << line << "\n";
    }
    if (!out) throw IoError(IoError::Kind::write_failure, "diagnostics: write failed for " + path);
}

}  // namespace nls
