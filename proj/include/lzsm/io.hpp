#pragma once

// Text formats: key=value model configuration, CSV outputs and the SVG heat map.

#include "lzsm/experiments.hpp"
#include "lzsm/model.hpp"
#include "lzsm/propagator.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace lzsm::io {

// Numbers are written with 12 significant digits and '.' as decimal separator.
std::string format_number(double value);

// Flat key=value configuration; '#' starts a comment.  Keys not present keep
// the values of `base`.  Unknown keys and malformed values throw DomainError.
ModelConfig parse_model_config(const std::string& text, ModelConfig base);
ModelParams load_model_config(const std::filesystem::path& path, const ModelConfig& base);

// Fe/MgO constants with the calibrated lever arm.
ModelConfig fe_mgo_model_config();

void write_model_config(std::ostream& out, const ModelParams& params);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_levels_csv(std::ostream& out, const ModelParams& params,
                      const std::vector<double>& v_dc_axis);
void write_scan_csv(std::ostream& out, const ScanResult& scan);
void write_scan_reference_csv(std::ostream& out, const ScanResult& scan);
void write_heatmap_csv(std::ostream& out, const HeatMap& map);
void write_overlay(std::ostream& out, const HeatMap& map);
void write_lz_csv(std::ostream& out, const std::vector<LZRun>& runs);

// Diverging ramp: -2 blue, 0 white, +2 red, with dashed resonance lines.
void write_heatmap_svg(std::ostream& out, const HeatMap& map);

// Reads a CSV with a header row into named columns.  Throws DomainError when a
// required column is missing or a cell does not parse.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

// ScanResult from the v_dc,sz_final file plus the v_dc,sz_initial reference.
ScanResult read_scan(const std::filesystem::path& scan_csv,
                     const std::filesystem::path& reference_csv, double frequency_ghz);
std::vector<LZRun> read_lz_runs(const std::filesystem::path& lz_csv);

}  // namespace lzsm::io
