#include "lzsm/io.hpp"

#include "lzsm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lzsm::io {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& context) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double value = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(value)) {
        throw DomainError("cannot parse number '" + t + "' (" + context + ")");
    }
    return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no" || t == "off") {
        return false;
    }
    throw DomainError("cannot parse boolean '" + t + "' for " + key);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::string ramp_colour(double sz) {
    const double t = std::clamp(sz / 2.0, -1.0, 1.0);
    int r = 255;
    int g = 255;
    int b = 255;
    if (t >= 0.0) {
        g = b = static_cast<int>(std::lround(255.0 * (1.0 - t)));
    } else {
        r = g = static_cast<int>(std::lround(255.0 * (1.0 + t)));
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

ModelConfig fe_mgo_model_config() {
    return ModelParams::fe_mgo().config();
}

ModelConfig parse_model_config(const std::string& text, ModelConfig base) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw DomainError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = body.substr(eq + 1);
        if (key == "delta0_ghz") {
            base.delta0_ghz = parse_double(value, key);
        } else if (key == "alpha_h_ghz_per_nm") {
            base.alpha_h_ghz_per_nm = parse_double(value, key);
        } else if (key == "alpha_f24_ghz_per_nm") {
            base.alpha_f24_ghz_per_nm = parse_double(value, key);
        } else if (key == "lever_arm_nm_per_v") {
            base.lever_arm_nm_per_v = parse_double(value, key);
        } else if (key == "epsilon_offset_ghz") {
            base.epsilon_offset_ghz = parse_double(value, key);
        } else if (key == "quad_bias_ghz_per_nm2") {
            base.quad_bias_ghz_per_nm2 = parse_double(value, key);
        } else if (key == "tunneling_modulation") {
            base.tunneling_modulation = parse_bool(value, key);
        } else {
            throw DomainError("config line " + std::to_string(line_no) + ": unknown key '" + key +
                              "'");
        }
    }
    return base;
}

ModelParams load_model_config(const std::filesystem::path& path, const ModelConfig& base) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return ModelParams(parse_model_config(text.str(), base));
}

void write_model_config(std::ostream& out, const ModelParams& params) {
    const ModelConfig& c = params.config();
    out << "delta0_ghz=" << format_number(c.delta0_ghz) << '\n'
        << "alpha_h_ghz_per_nm=" << format_number(c.alpha_h_ghz_per_nm) << '\n'
        << "alpha_f24_ghz_per_nm=" << format_number(c.alpha_f24_ghz_per_nm) << '\n'
        << "lever_arm_nm_per_v=" << format_number(c.lever_arm_nm_per_v) << '\n'
        << "epsilon_offset_ghz=" << format_number(c.epsilon_offset_ghz) << '\n'
        << "quad_bias_ghz_per_nm2=" << format_number(c.quad_bias_ghz_per_nm2) << '\n'
        << "tunneling_modulation=" << (c.tunneling_modulation ? "true" : "false") << '\n';
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t_ns,sz,p_plus,p_minus\n";
    for (const Sample& s : trajectory.samples) {
        out << format_number(s.t_ns) << ',' << format_number(s.sz) << ','
            << format_number(s.p_plus) << ',' << format_number(s.p_minus) << '\n';
    }
}

void write_levels_csv(std::ostream& out, const ModelParams& params,
                      const std::vector<double>& v_dc_axis) {
    out << "v_dc,e_minus_ghz,e_plus_ghz\n";
    for (const double v : v_dc_axis) {
        const AdiabaticLevels levels = adiabatic_levels(params, v);
        out << format_number(v) << ',' << format_number(levels.e_minus) << ','
            << format_number(levels.e_plus) << '\n';
    }
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
    out << "v_dc,sz_final\n";
    for (std::size_t i = 0; i < scan.v_dc.size(); ++i) {
        out << format_number(scan.v_dc[i]) << ',' << format_number(scan.sz_final[i]) << '\n';
    }
}

void write_scan_reference_csv(std::ostream& out, const ScanResult& scan) {
    out << "v_dc,sz_initial\n";
    for (std::size_t i = 0; i < scan.v_dc.size(); ++i) {
        out << format_number(scan.v_dc[i]) << ',' << format_number(scan.sz_initial[i]) << '\n';
    }
}

void write_heatmap_csv(std::ostream& out, const HeatMap& map) {
    out << "v_dc\\v_rf";
    for (const double v : map.v_rf) {
        out << ',' << format_number(v);
    }
    out << '\n';
    for (std::size_t i = 0; i < map.v_dc.size(); ++i) {
        out << format_number(map.v_dc[i]);
        for (std::size_t j = 0; j < map.v_rf.size(); ++j) {
            out << ',' << format_number(map.at(i, j));
        }
        out << '\n';
    }
}

void write_overlay(std::ostream& out, const HeatMap& map) {
    out << "n,v_dc\n";
    for (const Resonance& r : map.overlay) {
        out << r.n << ',' << format_number(r.voltage) << '\n';
    }
}

void write_lz_csv(std::ostream& out, const std::vector<LZRun>& runs) {
    out << "sweep_rate_v_per_ns,survival\n";
    for (const LZRun& run : runs) {
        out << format_number(run.sweep_rate_v_per_ns) << ',' << format_number(run.survival) << '\n';
    }
}

void write_heatmap_svg(std::ostream& out, const HeatMap& map) {
    // V_rf runs left to right, V_dc bottom to top, so resonances are horizontal lines.
    constexpr int kCell = 3;
    constexpr int kMargin = 50;
    const auto cols = static_cast<int>(map.v_rf.size());
    const auto rows = static_cast<int>(map.v_dc.size());
    const int width = cols * kCell + 2 * kMargin;
    const int height = rows * kCell + 2 * kMargin;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out << "<g shape-rendering=\"crispEdges\">\n";
    for (int i = 0; i < rows; ++i) {
        const int y = kMargin + (rows - 1 - i) * kCell;
        for (int j = 0; j < cols; ++j) {
            out << "<rect x=\"" << kMargin + j * kCell << "\" y=\"" << y << "\" width=\"" << kCell
                << "\" height=\"" << kCell << "\" fill=\""
                << ramp_colour(map.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))
                << "\"/>\n";
        }
    }
    out << "</g>\n";

    const double v_lo = map.v_dc.front();
    const double v_hi = map.v_dc.back();
    for (const Resonance& r : map.overlay) {
        const double frac = (r.voltage - v_lo) / (v_hi - v_lo);
        const double y = kMargin + (1.0 - frac) * rows * kCell;
        out << "<line x1=\"" << kMargin << "\" x2=\"" << kMargin + cols * kCell << "\" y1=\""
            << format_number(y) << "\" y2=\"" << format_number(y)
            << "\" stroke=\"#00a000\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";
    }
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-size=\"12\">V_rf (V) " << format_number(map.v_rf.front())
        << " .. " << format_number(map.v_rf.back()) << "</text>\n";
    out << "<text x=\"15\" y=\"" << height / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
        << "transform=\"rotate(-90 15 " << height / 2 << ")\">V_dc (V) " << format_number(v_lo)
        << " .. " << format_number(v_hi) << "</text>\n";
    out << "</svg>\n";
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw DomainError("CSV column '" + name + "' missing");
    }
    const auto idx = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        out.push_back(row[idx]);
    }
    return out;
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw DomainError("CSV is empty");
    }
    table.header = split(trim(line), ',');
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split(trim(line), ',');
        if (cells.size() != table.header.size()) {
            throw DomainError("CSV line " + std::to_string(line_no) + ": expected " +
                              std::to_string(table.header.size()) + " cells");
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) {
            row.push_back(parse_double(cell, "CSV line " + std::to_string(line_no)));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    try {
        return read_csv(in);
    } catch (const DomainError& e) {
        throw DomainError(path.string() + ": " + e.what());
    }
}

ScanResult read_scan(const std::filesystem::path& scan_csv,
                     const std::filesystem::path& reference_csv, double frequency_ghz) {
    const CsvTable scan = read_csv_file(scan_csv);
    const CsvTable reference = read_csv_file(reference_csv);
    ScanResult out;
    out.v_dc = scan.column("v_dc");
    out.sz_final = scan.column("sz_final");
    out.sz_initial = reference.column("sz_initial");
    if (reference.column("v_dc") != out.v_dc) {
        throw DomainError("scan and reference files have different V_dc axes");
    }
    out.wall_time_s.assign(out.v_dc.size(), 0.0);
    out.frequency_ghz = frequency_ghz;
    return out;
}

std::vector<LZRun> read_lz_runs(const std::filesystem::path& lz_csv) {
    const CsvTable table = read_csv_file(lz_csv);
    const auto rates = table.column("sweep_rate_v_per_ns");
    const auto survival = table.column("survival");
    std::vector<LZRun> out;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        out.push_back({rates[i], survival[i]});
    }
    return out;
}

}  // namespace lzsm::io
