#include "homodyne/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>

#include "homodyne/dataset_io.hpp"
#include "homodyne/em.hpp"
#include "homodyne/error.hpp"
#include "homodyne/fbp.hpp"
#include "homodyne/format.hpp"
#include "homodyne/grid.hpp"
#include "homodyne/simulator.hpp"
#include "homodyne/states.hpp"
#include "homodyne/table_io.hpp"

namespace homodyne::cli {
namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GridFlags {
  std::string slice;
  std::string lattice;

  void attach(CLI::App& app) {
    auto* s = app.add_option("--slice", slice, "Line slice q:A:B:STEPS@p=C (or p:A:B:STEPS@q=C)");
    auto* g = app.add_option("--grid", lattice, "Rectangular lattice qA:qB:qN,pA:pB:pN");
    s->excludes(g);
  }

  [[nodiscard]] GridSpec resolve() const {
    if (!slice.empty()) return GridSpec::parse_slice(slice);
    if (!lattice.empty()) return GridSpec::parse_lattice(lattice);
    throw ConfigError("one of --slice or --grid is required");
  }
};

template <typename Writer>
void write_atomically(const fs::path& path, Writer&& writer) {
  fs::path tmp = path;
  tmp += ".partial";
  try {
    {
      std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
      if (!file) throw DataError("cannot open '" + path.string() + "' for writing");
      writer(file);
      file.flush();
      if (!file) throw DataError("failed writing '" + path.string() + "'");
    }
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

void echo_dataset(ResultTable& table, const std::string& path, const Dataset& data) {
  table.add_header("data", path);
  table.add_header("state", data.state_desc);
  table.add_header("eta", format_real(data.eta));
  table.add_header("seed", std::to_string(data.seed));
  table.add_header("phases", std::to_string(data.phases));
  table.add_header("per_phase", std::to_string(data.per_phase));
  table.add_header("events", std::to_string(data.records.size()));
}

// Values of the truth --kind flag.
struct TruthKind {
  enum class Which { wigner, squasi, fbp_limit } which = Which::wigner;
  double parameter = 0.0;

  static TruthKind parse(const std::string& text) {
    if (text == "wigner") return {};
    const auto colon = text.find(':');
    const auto value = colon == std::string::npos ? std::nullopt : parse_real(std::string_view(text).substr(colon + 1));
    if (value && std::isfinite(*value)) {
      const auto head = text.substr(0, colon);
      if (head == "squasi") {
        if (*value > 0.0) throw DomainError("squasi ordering parameter must be <= 0");
        return {Which::squasi, *value};
      }
      if (head == "fbp-limit") {
        if (!(*value > 0.0 && *value <= 1.0)) throw DomainError("fbp-limit efficiency must lie in (0, 1]");
        return {Which::fbp_limit, *value};
      }
    }
    throw ConfigError("--kind must be wigner, squasi:S or fbp-limit:ETA, got '" + text + "'");
  }

  [[nodiscard]] double evaluate(const StateSpec& spec, double q, double p) const {
    switch (which) {
      case Which::wigner:
        return wigner_true(spec, q, p);
      case Which::squasi:
        return squasi_true(spec, q, p, parameter);
      case Which::fbp_limit:
        return fbp_expected_limit(spec, q, p, parameter);
    }
    return kNaN;
  }
};

std::pair<double, double> parse_range(const std::string& text) {
  const auto parts = split_view(text, ':');
  if (parts.size() == 2) {
    const auto lo = parse_real(parts[0]);
    const auto hi = parse_real(parts[1]);
    if (lo && hi && std::isfinite(*lo) && std::isfinite(*hi) && *hi > *lo) return {*lo, *hi};
  }
  throw ConfigError("--range must look like LO:HI with LO < HI, got '" + text + "'");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Homodyne tomography: simulate lossy homodyne records and reconstruct Wigner functions"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = auto)")->check(CLI::NonNegativeNumber);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a seeded homodyne dataset");
  std::string sim_state;
  double sim_eta = 1.0;
  int sim_phases = 0;
  int sim_per_phase = 0;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  sim->add_option("--state", sim_state, "vacuum | fock:n | coherent:re,im | cat:re,im,odd|even")->required();
  sim->add_option("--eta", sim_eta, "Detector efficiency in (0,1]")->required();
  sim->add_option("--phases", sim_phases, "Number of phases in [0, pi)")->required()->check(CLI::PositiveNumber);
  sim->add_option("--per-phase", sim_per_phase, "Events per phase")->required()->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "Random seed")->required();
  sim->add_option("--out", sim_out, "Output dataset file")->required();

  // reconstruct-mle
  auto* mle = app.add_subcommand("reconstruct-mle", "Maximum-likelihood (EM) Wigner reconstruction");
  std::string mle_data;
  int mle_nmax = 40;
  int mle_iters = 10000;
  double mle_tol = 0.0;
  std::string mle_out;
  std::string mle_weights;
  GridFlags mle_grid;
  mle->add_option("--data", mle_data, "Dataset file")->required();
  mle->add_option("--nmax", mle_nmax, "Fock truncation (columns 0..N-1)")->check(CLI::PositiveNumber);
  mle->add_option("--iters", mle_iters, "EM iteration budget")->check(CLI::PositiveNumber);
  mle->add_option("--tol", mle_tol, "Stop when the log-likelihood gains less than T per 50 iterations (0 = off)")
      ->check(CLI::NonNegativeNumber);
  mle_grid.attach(*mle);
  mle->add_option("--out", mle_out, "Output table")->required();
  mle->add_option("--weights", mle_weights, "Also write the estimated displaced-Fock populations per point");

  // reconstruct-fbp
  auto* fbp = app.add_subcommand("reconstruct-fbp", "Filtered back-projection baseline");
  std::string fbp_data;
  double fbp_cutoff = 6.0;
  std::string fbp_out;
  GridFlags fbp_grid_flags;
  fbp->add_option("--data", fbp_data, "Dataset file")->required();
  fbp->add_option("--cutoff", fbp_cutoff, "Ramp-filter cutoff k_c")->check(CLI::PositiveNumber);
  fbp_grid_flags.attach(*fbp);
  fbp->add_option("--out", fbp_out, "Output table")->required();

  // truth
  auto* truth = app.add_subcommand("truth", "Evaluate analytic phase-space functions");
  std::string truth_state;
  std::string truth_kind = "wigner";
  std::string truth_out;
  GridFlags truth_grid;
  truth->add_option("--state", truth_state, "State description")->required();
  truth->add_option("--kind", truth_kind, "wigner | squasi:S | fbp-limit:ETA");
  truth_grid.attach(*truth);
  truth->add_option("--out", truth_out, "Output table")->required();

  // histogram
  auto* hist = app.add_subcommand("histogram", "Histogram of outcomes at one phase");
  std::string hist_data;
  double hist_phase = 0.0;
  double hist_tol = 1e-9;
  int hist_bins = 100;
  std::string hist_range = "-4:4";
  std::string hist_out;
  hist->add_option("--data", hist_data, "Dataset file")->required();
  hist->add_option("--phase", hist_phase, "Selected phase (radians)");
  hist->add_option("--tol", hist_tol, "Phase selection tolerance")->check(CLI::NonNegativeNumber);
  hist->add_option("--bins", hist_bins, "Number of bins")->check(CLI::PositiveNumber);
  hist->add_option("--range", hist_range, "LO:HI");
  hist->add_option("--out", hist_out, "Output counts table")->required();

  // compare
  auto* cmp = app.add_subcommand("compare", "Pointwise difference of two tables");
  std::string cmp_a;
  std::string cmp_b;
  std::string cmp_out;
  cmp->add_option("--a", cmp_a, "First table")->required();
  cmp->add_option("--b", cmp_b, "Second table")->required();
  cmp->add_option("--out", cmp_out, "Output joined table")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "homodyne-tomo: usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  int stage = kExitUsage;  // flag validation first, then data handling
  try {
    if (*sim) {
      const StateSpec spec = StateSpec::parse(sim_state);
      if (!(sim_eta > 0.0 && sim_eta <= 1.0)) throw DomainError("--eta must lie in (0, 1]");
      stage = kExitData;
      const Dataset data = simulate(spec, sim_eta, sim_phases, sim_per_phase, sim_seed, threads);
      write_atomically(sim_out, [&](std::ostream& f) { write_dataset(f, data); });
      return kExitOk;
    }

    if (*mle) {
      const GridSpec grid = mle_grid.resolve();
      ReconstructionConfig cfg;
      cfg.n_max = mle_nmax;
      cfg.max_iters = mle_iters;
      cfg.loglik_tol = mle_tol;
      detail::check_fock_index(cfg.n_max - 1, kFockIndexCap);
      stage = kExitData;
      const Dataset data = load_dataset(mle_data);
      const auto results = reconstruct_grid(data, grid, cfg, threads);
      ResultTable table;
      table.add_header("command", "reconstruct-mle");
      echo_dataset(table, mle_data, data);
      table.add_header("nmax", std::to_string(cfg.n_max));
      table.add_header("iters", std::to_string(cfg.max_iters));
      table.add_header("tol", format_real(cfg.loglik_tol));
      table.add_header("grid", grid.description());
      for (const auto& r : results) {
        if (!r.ok()) {
          table.add_header("error", format_real(r.point.q) + "," + format_real(r.point.p) + ": " + r.error);
          table.rows.push_back({r.point.q, r.point.p, kNaN, 0, kNaN});
          continue;
        }
        const auto& d = r.estimate->diagnostics;
        if (d.excluded_events > 0) {
          table.add_header("excluded", format_real(r.point.q) + "," + format_real(r.point.p) + ": " +
                                           std::to_string(d.excluded_events));
        }
        table.rows.push_back({r.point.q, r.point.p, r.wigner, d.iterations_run, d.final_loglik});
      }
      if (!mle_weights.empty()) {
        write_atomically(mle_weights, [&](std::ostream& f) {
          f << "# command=reconstruct-mle\n# data=" << mle_data << "\n# nmax=" << cfg.n_max << '\n';
          f << "# columns=q\tp\trho_0..rho_" << cfg.n_max - 1 << '\n';
          for (const auto& r : results) {
            f << format_real(r.point.q) << '\t' << format_real(r.point.p);
            for (int n = 0; n < cfg.n_max; ++n) f << '\t' << format_real(r.ok() ? r.estimate->weights[n] : kNaN);
            f << '\n';
          }
        });
      }
      write_atomically(mle_out, [&](std::ostream& f) { write_table(f, table); });
      return kExitOk;
    }

    if (*fbp) {
      const GridSpec grid = fbp_grid_flags.resolve();
      const FbpConfig cfg{fbp_cutoff};
      stage = kExitData;
      const Dataset data = load_dataset(fbp_data);
      const auto values = fbp_grid(data, grid, cfg, threads);
      ResultTable table;
      table.add_header("command", "reconstruct-fbp");
      echo_dataset(table, fbp_data, data);
      table.add_header("cutoff", format_real(cfg.cutoff));
      table.add_header("grid", grid.description());
      for (std::size_t i = 0; i < values.size(); ++i) {
        table.rows.push_back({grid.points()[i].q, grid.points()[i].p, values[i], 0, kNaN});
      }
      write_atomically(fbp_out, [&](std::ostream& f) { write_table(f, table); });
      return kExitOk;
    }

    if (*truth) {
      const StateSpec spec = StateSpec::parse(truth_state);
      const TruthKind kind = TruthKind::parse(truth_kind);
      const GridSpec grid = truth_grid.resolve();
      stage = kExitData;
      ResultTable table;
      table.add_header("command", "truth");
      table.add_header("state", spec.to_string());
      table.add_header("kind", truth_kind);
      table.add_header("grid", grid.description());
      for (const auto& pt : grid.points()) table.rows.push_back({pt.q, pt.p, kind.evaluate(spec, pt.q, pt.p), 0, kNaN});
      write_atomically(truth_out, [&](std::ostream& f) { write_table(f, table); });
      return kExitOk;
    }

    if (*hist) {
      const auto [lo, hi] = parse_range(hist_range);
      stage = kExitData;
      const Dataset data = load_dataset(hist_data);
      const Histogram h = histogram(data, hist_phase, hist_tol, hist_bins, lo, hi);
      write_atomically(hist_out, [&](std::ostream& f) {
        f << "# command=histogram\n";
        f << "# data=" << hist_data << '\n';
        f << "# state=" << data.state_desc << '\n';
        f << "# eta=" << format_real(data.eta) << '\n';
        f << "# phase=" << format_real(hist_phase) << '\n';
        f << "# tol=" << format_real(hist_tol) << '\n';
        f << "# selected=" << h.selected << '\n';
        f << "# underflow=" << h.underflow << '\n';
        f << "# overflow=" << h.overflow << '\n';
        if (h.empty_selection) f << "# warning=empty_selection\n";
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
          const double left = h.lower + static_cast<double>(i) * h.bin_width();
          f << format_real(left) << '\t' << format_real(left + h.bin_width()) << '\t' << h.counts[i] << '\n';
        }
      });
      return kExitOk;
    }

    if (*cmp) {
      stage = kExitData;
      const ResultTable a = load_table(cmp_a);
      const ResultTable b = load_table(cmp_b);
      if (a.rows.size() != b.rows.size()) throw DataError("tables have different row counts");
      double max_abs = 0.0;
      std::vector<double> diffs(a.rows.size());
      for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i].q != b.rows[i].q || a.rows[i].p != b.rows[i].p) {
          throw DataError("tables disagree on the phase-space point of row " + std::to_string(i + 1));
        }
        diffs[i] = a.rows[i].w - b.rows[i].w;
        max_abs = std::max(max_abs, std::abs(diffs[i]));
      }
      write_atomically(cmp_out, [&](std::ostream& f) {
        f << "# command=compare\n# a=" << cmp_a << "\n# b=" << cmp_b << '\n';
        f << "# columns=q\tp\tW_a\tW_b\tW_a-W_b\n";
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
          f << format_real(a.rows[i].q) << '\t' << format_real(a.rows[i].p) << '\t' << format_real(a.rows[i].w) << '\t'
            << format_real(b.rows[i].w) << '\t' << format_real(diffs[i]) << '\n';
        }
        f << "# max_abs_diff=" << format_real(max_abs) << '\n';
      });
      out << "max_abs_diff=" << format_real(max_abs) << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "homodyne-tomo: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "homodyne-tomo: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TruncationError& e) {
    err << "homodyne-tomo: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "homodyne-tomo: error: " << e.what() << '\n';
    return stage;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace homodyne::cli
