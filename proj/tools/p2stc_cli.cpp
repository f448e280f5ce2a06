#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "p2stc/analysis.hpp"
#include "p2stc/config.hpp"
#include "p2stc/convcode.hpp"
#include "p2stc/puncturing.hpp"
#include "p2stc/report.hpp"
#include "p2stc/version.hpp"

using namespace p2stc;

namespace {

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    out.push_back(std::stod(item, &pos));
    if (pos != item.size()) throw std::invalid_argument("bad number '" + item + "' in grid");
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  return read_file(path);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

SimScenario single_scenario(const std::string& path) {
  auto all = load_scenarios(path);
  if (all.size() != 1) throw std::invalid_argument("config must describe exactly one scenario for this command");
  return all.front();
}

CsvRow sweep_row(const std::string& id, const BetaSweepRow& r) {
  CsvRow row;
  row.config_id = id;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", r.beta);
  row.beta = buf;
  row.eb_n0_db = r.eb_n0_db;
  row.frames = r.frames;
  row.bit_errors = r.bit_errors;
  row.frame_errors = r.frame_errors;
  row.ber = r.ber;
  row.fer = r.frames ? static_cast<double>(r.frame_errors) / static_cast<double>(r.frames) : 0.0;
  row.ci_low = r.ci.low;
  row.ci_high = r.ci.high;
  return row;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Punctured pragmatic space-time code simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // encode
  auto* enc = app.add_subcommand("encode", "Encode a bit string (stdin or file) with the mother code");
  std::string enc_gens = "5,7", enc_in, enc_matrix;
  bool no_term = false;
  std::size_t enc_group = 0;
  enc->add_option("--generators,-g", enc_gens, "Octal generators, e.g. 133,171");
  enc->add_option("--input,-i", enc_in, "Input file (default stdin)");
  enc->add_option("--matrix,-m", enc_matrix, "Puncture with a catalog matrix or literal rows");
  enc->add_flag("--no-terminate", no_term, "Do not append the zero tail");
  enc->add_option("--group", enc_group, "Bits per output group (default N, or 0 for none after puncturing)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run Monte Carlo scenarios from a JSON config");
  std::string sim_cfg, sim_out;
  unsigned sim_workers = 0;
  sim->add_option("--config,-c", sim_cfg, "Scenario JSON")->required();
  sim->add_option("--out,-o", sim_out, "Output directory")->required();
  sim->add_option("--workers,-j", sim_workers, "Override worker threads");

  // sweep-beta
  auto* sweep = app.add_subcommand("sweep-beta", "BER against a fixed β grid with common random numbers");
  std::string sweep_cfg, sweep_out, sweep_grid = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  std::uint64_t sweep_frames = 1000;
  sweep->add_option("--config,-c", sweep_cfg, "Scenario JSON")->required();
  sweep->add_option("--betas", sweep_grid, "Comma-separated β values");
  sweep->add_option("--frames", sweep_frames, "Frames per (β, Eb/N0) point");
  sweep->add_option("--out,-o", sweep_out, "CSV file (default stdout)");

  // search-patterns
  auto* search = app.add_subcommand("search-patterns", "Rank basic puncturing patterns by BER");
  unsigned ntx = 2, zeros = 2, max_width = 4, period = 10;
  std::string search_cfg, search_out, search_grid = "0.3,0.4,0.5,0.6,0.7";
  std::uint64_t search_frames = 1000;
  search->add_option("--ntx", ntx, "Transmit antennas")->required();
  search->add_option("--zeros", zeros, "Zeros per pattern")->required();
  search->add_option("--config,-c", search_cfg, "Scenario JSON (code, Eb/N0, frame size)")->required();
  search->add_option("--max-width", max_width, "Widest pattern in columns");
  search->add_option("--period", period, "Puncturing period the patterns are embedded in");
  search->add_option("--betas", search_grid, "β grid for the per-pattern optimum");
  search->add_option("--frames", search_frames, "Frames per pattern and β");
  search->add_option("--out,-o", search_out, "CSV file (default stdout)");

  // bound
  auto* bound = app.add_subcommand("bound", "Block-fading diversity bound");
  unsigned b_l = 1, b_n = 2;
  std::string b_rate;
  bound->add_option("--L", b_l, "Fading blocks per frame")->required();
  bound->add_option("--N", b_n, "Transmit antennas")->required();
  bound->add_option("--rate", b_rate, "Code rate p/q")->required();

  // plot
  auto* plot = app.add_subcommand("plot", "Render an SVG from a results CSV");
  std::string plot_csv, plot_out;
  plot->add_option("--csv", plot_csv, "Results CSV")->required();
  plot->add_option("--out,-o", plot_out, "SVG file (default stdout)");

  // debugging dumps
  auto* trellis = app.add_subcommand("trellis", "Dump the trellis as CSV");
  std::string tr_gens = "5,7";
  trellis->add_option("--generators,-g", tr_gens, "Octal generators");

  auto* span = app.add_subcommand("spanning", "Show the spanning map of a puncturing matrix");
  std::string span_matrix;
  span->add_option("--matrix,-m", span_matrix, "Catalog name or literal rows")->required();

  auto* info = app.add_subcommand("code-info", "Rate and free distance of a code, optionally punctured");
  std::string info_gens = "133,171", info_matrix;
  info->add_option("--generators,-g", info_gens, "Octal generators");
  info->add_option("--matrix,-m", info_matrix, "Catalog name or literal rows");

  auto* cat = app.add_subcommand("catalog", "List built-in puncturing matrices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*enc) {
      const auto code = ConvCode::from_octal(enc_gens);
      Bits coded = encode(code, parse_bits(read_input(enc_in)), !no_term);
      std::size_t group = code.n_outputs();
      if (!enc_matrix.empty()) {
        const auto m = resolve_matrix(enc_matrix);
        if (m.rows() != code.n_outputs()) throw std::invalid_argument("matrix rows differ from the number of generators");
        coded = apply_puncture(coded, m);
        group = 0;
      }
      if (enc->count("--group")) group = enc_group;
      std::cout << format_bits(coded, group) << '\n';
    } else if (*sim) {
      auto scenarios = load_scenarios(sim_cfg);
      std::vector<SimResult> results;
      for (auto& sc : scenarios) {
        if (sim_workers) sc.workers = sim_workers;
        results.push_back(run_scenario(sc));
        std::cerr << sc.id << ": " << results.back().points.size() << " points in " << results.back().wall_seconds
                  << " s\n";
      }
      emit_outputs(results, sim_out);
    } else if (*sweep) {
      const auto sc = single_scenario(sweep_cfg);
      const auto rows = sweep_beta(sc, parse_grid(sweep_grid), sweep_frames);
      std::vector<CsvRow> out;
      for (const auto& r : rows) out.push_back(sweep_row(sc.id, r));
      write_output(sweep_out, write_csv(out));
    } else if (*search) {
      const auto sc = single_scenario(search_cfg);
      if (ConvCode::from_octal(sc.generators).n_outputs() != ntx)
        throw std::invalid_argument("--ntx differs from the number of generators in the config");
      const auto ranked = search_patterns(ntx, zeros, max_width, sc, parse_grid(search_grid), search_frames, period);
      std::vector<CsvRow> out;
      for (const auto& s : ranked) {
        CsvRow row;
        std::string id;
        for (const auto& r : s.pattern.block) id += (id.empty() ? "" : "/") + r;
        row.config_id = id;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", s.best_beta);
        row.beta = buf;
        row.eb_n0_db = sc.eb_n0_db.front();
        row.frames = s.frames;
        row.bit_errors = s.bit_errors;
        row.frame_errors = s.frame_errors;
        row.ber = s.ber;
        row.fer = s.frames ? static_cast<double>(s.frame_errors) / static_cast<double>(s.frames) : 0.0;
        row.ci_low = s.ci.low;
        row.ci_high = s.ci.high;
        out.push_back(row);
      }
      write_output(search_out, write_csv(out));
    } else if (*bound) {
      std::cout << diversity_bound(b_l, b_n, Rational::parse(b_rate)) << '\n';
    } else if (*plot) {
      write_output(plot_out, render_svg(parse_csv(read_file(plot_csv))));
    } else if (*trellis) {
      build_trellis(ConvCode::from_octal(tr_gens)).dump_csv(std::cout);
    } else if (*span) {
      const auto m = resolve_matrix(span_matrix);
      const auto map = spanning_map(m);
      std::cout << "# matrix " << m.str() << " rate " << punctured_rate(m).str() << " delta " << map.delta()
                << " window " << map.window_transitions << " transitions\n";
      map.dump_csv(std::cout);
    } else if (*info) {
      const auto code = ConvCode::from_octal(info_gens);
      const auto m = info_matrix.empty() ? PuncturingMatrix::identity(code.n_outputs()) : resolve_matrix(info_matrix);
      std::cout << "generators " << code.octal() << "\nK " << code.constraint_length() << "\nstates "
                << (1u << code.memory()) << "\nfree_distance " << free_distance(code) << "\nrate "
                << punctured_rate(m).str() << '\n';
    } else if (*cat) {
      for (const auto& e : catalog())
        std::cout << e.name << ' ' << e.matrix.str() << ' ' << punctured_rate(e.matrix).str() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "p2stc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
