#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "p2stc/simulation.hpp"

namespace p2stc {

/// One results-CSV line.
struct CsvRow {
  std::string config_id;
  std::string beta;
  double eb_n0_db = 0.0;
  std::uint64_t frames = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t frame_errors = 0;
  double ber = 0.0;
  double fer = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "config-id,beta,eb_n0_db,frames,bit_errors,frame_errors,ber,fer,ci_low,ci_high";

std::vector<CsvRow> to_rows(const SimResult& result);
std::string write_csv(const std::vector<CsvRow>& rows);
std::vector<CsvRow> parse_csv(std::string_view text);

/// Log-scale BER (solid) and FER (dashed) against Eb/N0, one colour per config-id.
std::string render_svg(const std::vector<CsvRow>& rows);

/// Writes results.csv, plot.svg and metadata.json into out_dir.
void emit_outputs(const std::vector<SimResult>& results, const std::filesystem::path& out_dir);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace p2stc
