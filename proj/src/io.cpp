#include "parlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace parlab {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void dump_field_csv(const ScalarField& field, const std::string& csv_path,
                    const EquationParams& params, const std::string& source_text) {
    field.validate();
    std::ofstream out(csv_path);
    if (!out) throw ComputeError("cannot open " + csv_path + " for writing");
    const GridSpec& g = field.spec;
    out << (g.n == 1 ? "t,x1,value\n" : "t,x1,x2,value\n");
    for (int s = 0; s < field.slice_count(); ++s) {
        std::string ts = format_double(field.times[s]);
        for (int i = 0; i < g.node_count(); ++i) {
            Vec2 x = g.coords(i);
            out << ts << ',' << format_double(x[0]);
            if (g.n == 2) out << ',' << format_double(x[1]);
            out << ',' << format_double(field.slices[s][i]) << '\n';
        }
    }
    out.close();

    nlohmann::json meta;
    meta["grid"] = {{"n", g.n},          {"h", g.h},           {"dt", g.dt},
                    {"t_depth", g.t_depth}, {"origin", {g.origin[0], g.origin[1]}}};
    meta["params"] = {{"gamma", params.gamma},
                      {"p", params.p},
                      {"n", params.n},
                      {"eps", params.eps},
                      {"source_bound", params.source_bound},
                      {"source", source_text}};
    std::ofstream mo(csv_path + ".meta.json");
    if (!mo) throw ComputeError("cannot open sidecar for " + csv_path);
    mo << meta.dump(2) << '\n';
}

ScalarField load_field_csv(const std::string& csv_path) {
    std::ifstream meta_in(csv_path + ".meta.json");
    if (!meta_in) throw ComputeError("missing sidecar for " + csv_path);
    nlohmann::json meta = nlohmann::json::parse(meta_in);
    auto jg = meta.at("grid");
    GridSpec g = GridSpec::make(jg.at("n").get<int>(), jg.at("h").get<double>(),
                                jg.at("t_depth").get<double>(), jg.at("dt").get<double>(),
                                {jg.at("origin")[0].get<double>(), jg.at("origin")[1].get<double>()});

    std::ifstream in(csv_path);
    if (!in) throw ComputeError("cannot open " + csv_path);
    std::string line;
    std::getline(in, line); // header
    ScalarField f;
    f.spec = g;
    int nodes = g.node_count();
    std::vector<double> slice;
    slice.reserve(nodes);
    double cur_t = 0.0;
    bool have_slice = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        double t = std::strtod(cell.c_str(), nullptr);
        for (int skip = 0; skip < g.n; ++skip) std::getline(ss, cell, ',');
        std::getline(ss, cell, ',');
        double v = std::strtod(cell.c_str(), nullptr);
        if (!have_slice || t != cur_t) {
            if (have_slice) {
                if (static_cast<int>(slice.size()) != nodes)
                    throw ComputeError("truncated slice in " + csv_path);
                f.times.push_back(cur_t);
                f.slices.push_back(slice);
            }
            slice.clear();
            cur_t = t;
            have_slice = true;
        }
        slice.push_back(v);
    }
    if (have_slice) {
        if (static_cast<int>(slice.size()) != nodes)
            throw ComputeError("truncated slice in " + csv_path);
        f.times.push_back(cur_t);
        f.slices.push_back(slice);
    }
    f.validate();
    return f;
}

} // namespace parlab
