// sqbessel command line: coefficient generation and checks, sampling,
// moment diagnostics and option pricing experiments.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqbessel/sqbessel.hpp"

#ifndef SQBESSEL_DATA_DIR
#define SQBESSEL_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace sqbessel;

namespace {

struct OutputOpts {
  std::string format = "csv";
  std::string out;
  bool omit_timing = false;
};

void add_output_opts(CLI::App* cmd, OutputOpts& o) {
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "output file (default stdout)");
  cmd->add_flag("--omit-timing", o.omit_timing, "drop timing columns");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

template <class T>
void emit(const std::vector<T>& rows, const OutputOpts& o, const char* command) {
  if (o.format == "json") {
    nlohmann::json doc = {{"command", command}, {"records", to_json(rows, o.omit_timing)}};
    write_text(o.out, doc.dump(2) + "\n");
  } else {
    write_text(o.out, to_csv(rows, o.omit_timing));
  }
}

std::vector<std::string> default_coeff_files() {
  std::vector<std::string> files;
  const fs::path dir(SQBESSEL_DATA_DIR);
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

std::shared_ptr<const PatchSet> load_set(const std::vector<std::string>& given) {
  const auto files = given.empty() ? default_coeff_files() : given;
  if (files.empty()) throw std::runtime_error("no coefficient files (use --coeffs)");
  return std::make_shared<const PatchSet>(load_patch_files(files));
}

std::string acc_label(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", a);
  return buf;
}

std::pair<double, double> parse_interval(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--delta", "expected c:d");
  std::size_t p1 = 0, p2 = 0;
  const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
  const double c = std::stod(a, &p1), d = std::stod(b, &p2);
  if (p1 != a.size() || p2 != b.size()) throw CLI::ValidationError("--delta", "expected c:d");
  return {c, d};
}

// ---- gen-coeffs -------------------------------------------------------------

struct GenOpts {
  std::string delta;
  double acc = 1e-8;
  std::optional<double> w_minus;
  double w_plus = 1.0;
  int order_cap = 60;
  std::string out;
};

int cmd_gen_coeffs(const GenOpts& o) {
  const auto [c, d] = parse_interval(o.delta);
  if (!(c > 0.0) || !(c < d)) {
    std::cerr << "gen-coeffs: need 0 < c < d, got " << o.delta << "\n";
    return 2;
  }
  if (!(o.acc > 0.0)) {
    std::cerr << "gen-coeffs: --acc must be positive\n";
    return 2;
  }
  RegionSpec spec = default_region_spec(c);
  if (o.w_minus) spec.w_minus = *o.w_minus;
  spec.w_plus = o.w_plus;
  FitOptions fo;
  fo.order_cap = o.order_cap;
  PatchSet set;
  try {
    spec.validate();
    set.groups.push_back(fit_group(c, d, spec, o.acc, fo));
  } catch (const ConvergenceError& e) {
    std::cerr << "gen-coeffs: " << e.what() << " (achieved error estimate " << e.achieved()
              << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "gen-coeffs: " << e.what() << "\n";
    return 3;
  }
  std::printf("delta [%g, %g] accuracy %g\n", c, d, o.acc);
  for (const auto& p : set.groups[0].patches)
    std::printf("  %-6s M=%d N=%d omitted_max=%.3e\n", region_name(p.region.region_id),
                p.order_delta, p.order_u, p.omitted_max);
  if (!o.out.empty()) {
    save_patches(set, o.out);
    std::printf("wrote %s\n", o.out.c_str());
  }
  return 0;
}

// ---- validate-coeffs ----------------------------------------------------------

struct ValidateOpts {
  std::vector<std::string> coeffs;
  int n_delta = 50;
  int n_u = 200;
  double max_residual = -1.0;
};

int cmd_validate_coeffs(const ValidateOpts& o) {
  const auto set = load_set(o.coeffs);
  ChiSquareSampler s(set);
  bool ok = true;
  for (const auto& g : set->groups) {
    std::printf("group [%g, %g] accuracy %g\n", g.delta_lo, g.delta_hi, g.target_accuracy);
    for (const auto& p : g.patches) {
      const auto cc = clenshaw_check(p, 100, 1);
      std::printf("  %-6s M=%d N=%d omitted_max=%.3e clenshaw_rel_diff=%.2e\n",
                  region_name(p.region.region_id), p.order_delta, p.order_u, p.omitted_max,
                  cc.max_rel_diff);
    }
    const auto ic = inverse_check(s, g.delta_lo, g.delta_hi, o.n_delta, o.n_u, 1e-6, 1.0 - 1e-8);
    std::printf("  inverse residual max %.3e (first %.3e, middle %.3e, tail %.3e) worst at "
                "delta=%.6g u=%.6g\n",
                ic.max_residual, ic.max_residual_by_region[0], ic.max_residual_by_region[1],
                ic.max_residual_by_region[2], ic.worst_delta, ic.worst_u);
    if (o.max_residual > 0.0 && ic.max_residual > o.max_residual) ok = false;
  }
  return ok ? 0 : 1;
}

// ---- sample -------------------------------------------------------------------

struct SampleOpts {
  double delta = 0.18;
  double lambda = 0.0;
  std::uint64_t n = 10;
  std::uint64_t seed = kDefaultSeed;
  std::vector<std::string> coeffs;
  OutputOpts out;
};

int cmd_sample(const SampleOpts& o) {
  NoncentralParams np{o.delta, o.lambda};
  np.validate();
  ChiSquareSampler s(load_set(o.coeffs));
  RngStream rng(o.seed, 0);
  std::vector<SampleRecord> rows(o.n);
  for (std::uint64_t i = 0; i < o.n; ++i)
    rows[i] = {static_cast<std::int64_t>(i), s.sample_noncentral(np, rng)};
  emit(rows, o.out, "sample");
  return 0;
}

// ---- moments ------------------------------------------------------------------

struct MomentOpts {
  double delta = 0.1;
  double lambda = 0.11517;
  std::uint64_t n = 1000000;
  std::uint64_t seed = kDefaultSeed;
  int k_max = 10;
  unsigned threads = 0;
  std::vector<std::string> coeffs;
  OutputOpts out;
};

int cmd_moments(const MomentOpts& o) {
  const auto set = load_set(o.coeffs);
  const auto rows = moment_report({o.delta, o.lambda}, o.n, o.k_max, set, o.seed);
  std::vector<MomentRecord> recs;
  for (const auto& r : rows)
    recs.push_back({o.delta, o.lambda, static_cast<std::int64_t>(o.n),
                    static_cast<std::int64_t>(o.seed), r.k, r.analytic, r.sample, r.rel_error,
                    r.jackknife_se});
  emit(recs, o.out, "moments");
  return 0;
}

// ---- price --------------------------------------------------------------------

struct PriceOpts {
  std::string option = "put";
  std::string scheme = "exact";
  double h = 0.1;
  std::uint64_t n = 1000000;
  std::uint64_t seed = kDefaultSeed;
  int fixings = 10;
  int basket_case = 1;
  std::string coupling = "common";
  double a = 0.045, b = -0.5, c = 1.0, x0 = 0.09, strike = 0.09, maturity = 10.0;
  bool sweep_h = false;
  std::vector<double> h_values = {1.0, 0.5, 0.25, 0.1};
  bool sweep_paths = false;
  std::vector<std::uint64_t> path_counts = {10000, 100000, 1000000, 10000000};
  unsigned threads = 0;
  std::vector<std::string> coeffs;
  OutputOpts out;
};

OptionSpec build_spec(const PriceOpts& o) {
  if (o.option == "basket") return paper_basket_case(o.basket_case);
  const CirParams asset{o.a, o.b, o.c, o.x0};
  OptionSpec s;
  s.kind = o.option == "asian" ? OptionKind::AsianPut : OptionKind::Put;
  s.strike = o.strike;
  s.maturity = o.maturity;
  s.fixings = o.option == "asian" ? o.fixings : 1;
  s.assets = {asset};
  return s;
}

int cmd_price(const PriceOpts& o) {
  const OptionSpec spec = build_spec(o);
  spec.validate();
  const Coupling coupling = o.coupling == "independent" ? Coupling::Independent : Coupling::CommonU;
  const double reference = spec.kind == OptionKind::Put
                               ? put_price_exact(spec.assets[0], spec.strike, spec.maturity)
                               : std::numeric_limits<double>::quiet_NaN();

  auto run = [&](Scheme scheme, std::uint64_t n, std::shared_ptr<const PatchSet> set) {
    McConfig cfg;
    cfg.n_paths = n;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    const McResult r = price_mc(spec, cfg, scheme, set, coupling);
    PriceRecord rec;
    rec.option = o.option;
    rec.scheme = scheme.kind == SchemeKind::Exact ? "exact" : "fte";
    rec.h = scheme.kind == SchemeKind::Exact ? 0.0 : scheme.h;
    rec.fixings = spec.fixings;
    rec.n_paths = static_cast<std::int64_t>(r.n_paths);
    rec.seed = static_cast<std::int64_t>(o.seed);
    if (scheme.kind == SchemeKind::Exact) {
      double acc = 0.0;
      for (const auto& g : set->groups) acc = std::max(acc, g.target_accuracy);
      rec.coeffs = acc_label(acc);
    }
    rec.price = r.price;
    rec.std_error = r.std_error;
    rec.std_error_x1e3 = r.std_error * 1e3;
    rec.reference = reference;
    if (!std::isnan(reference)) rec.relative_error = relative_error(reference, r.price);
    rec.elapsed_s = r.elapsed;
    return rec;
  };

  std::vector<PriceRecord> rows;
  if (o.sweep_paths) {
    // one patch set per file, so accuracies can be compared; files that do
    // not cover every asset's delta are skipped
    const auto files = o.coeffs.empty() ? default_coeff_files() : o.coeffs;
    for (const auto& f : files) {
      auto set = std::make_shared<const PatchSet>(load_patches(f));
      const bool usable = std::all_of(spec.assets.begin(), spec.assets.end(),
                                      [&](const CirParams& a) { return set->covers(a.delta()); });
      if (!usable) {
        std::cerr << "price: skipping " << f << " (does not cover the assets' delta)\n";
        continue;
      }
      for (auto n : o.path_counts) rows.push_back(run(Scheme::exact(), n, set));
    }
    if (rows.empty()) throw CoverageError("no patch file covers the assets' delta");
  } else {
    const auto set = load_set(o.coeffs);
    if (o.sweep_h) {
      rows.push_back(run(Scheme::exact(), o.n, set));
      for (double h : o.h_values) rows.push_back(run(Scheme::fte(h), o.n, set));
    } else {
      rows.push_back(run(o.scheme == "fte" ? Scheme::fte(o.h) : Scheme::exact(), o.n, set));
    }
  }
  emit(rows, o.out, "price");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squared Bessel / CIR simulation by Chebyshev inversion of chi-square"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* g = app.add_subcommand("gen-coeffs", "fit Chebyshev patches for a delta interval");
  g->add_option("--delta", gen.delta, "interval c:d")->required();
  g->add_option("--acc", gen.acc, "target coefficient accuracy");
  g->add_option("--w-minus", gen.w_minus, "First/Middle boundary in w (default min(0.01, c^2))");
  g->add_option("--w-plus", gen.w_plus, "Middle/Tail boundary in w");
  g->add_option("--order-cap", gen.order_cap, "largest order tried in either direction");
  g->add_option("--out", gen.out, "patch file to write");

  ValidateOpts val;
  auto* v = app.add_subcommand("validate-coeffs", "load patch files and check them");
  v->add_option("--coeffs", val.coeffs, "patch files (default: data directory)");
  v->add_option("--grid-delta", val.n_delta, "delta nodes per group");
  v->add_option("--grid-u", val.n_u, "u nodes");
  v->add_option("--max-residual", val.max_residual, "fail if the CDF residual exceeds this");

  SampleOpts smp;
  auto* s = app.add_subcommand("sample", "draw non-central chi-square variates");
  s->add_option("--delta", smp.delta, "degrees of freedom");
  s->add_option("--lambda", smp.lambda, "non-centrality");
  s->add_option("--n", smp.n, "number of draws");
  s->add_option("--seed", smp.seed, "RNG seed");
  s->add_option("--coeffs", smp.coeffs, "patch files");
  add_output_opts(s, smp.out);

  MomentOpts mom;
  auto* m = app.add_subcommand("moments", "first moments of the sampler against analytic values");
  m->add_option("--delta", mom.delta, "degrees of freedom");
  m->add_option("--lambda", mom.lambda, "non-centrality");
  m->add_option("--n", mom.n, "number of draws");
  m->add_option("--seed", mom.seed, "RNG seed");
  m->add_option("--k-max", mom.k_max, "highest moment");
  m->add_option("--coeffs", mom.coeffs, "patch files");
  add_output_opts(m, mom.out);

  PriceOpts pr;
  auto* p = app.add_subcommand("price", "Monte Carlo option prices");
  p->set_help_flag("--help", "print this help");  // -h would clash with --h
  p->add_option("--option", pr.option, "put, asian or basket")
      ->check(CLI::IsMember({"put", "asian", "basket"}));
  p->add_option("--scheme", pr.scheme, "exact or fte")->check(CLI::IsMember({"exact", "fte"}));
  p->add_option("--h", pr.h, "FTE step")->check(CLI::PositiveNumber);
  p->add_option("--n", pr.n, "paths");
  p->add_option("--seed", pr.seed, "RNG seed");
  p->add_option("--fixings", pr.fixings, "Asian monitoring dates")->check(CLI::PositiveNumber);
  p->add_option("--case", pr.basket_case, "basket parameter case")->check(CLI::Range(1, 4));
  p->add_option("--coupling", pr.coupling, "basket coupling: common or independent")
      ->check(CLI::IsMember({"common", "independent"}));
  p->add_option("--a", pr.a, "CIR a");
  p->add_option("--b", pr.b, "CIR b");
  p->add_option("--c", pr.c, "CIR c");
  p->add_option("--x0", pr.x0, "initial value");
  p->add_option("--strike", pr.strike, "strike K");
  p->add_option("--maturity", pr.maturity, "maturity T");
  p->add_flag("--sweep-h", pr.sweep_h, "exact plus FTE at each --h-values step");
  p->add_option("--h-values", pr.h_values, "steps for --sweep-h");
  p->add_flag("--sweep-paths", pr.sweep_paths, "exact price per patch file and path count");
  p->add_option("--path-counts", pr.path_counts, "path counts for --sweep-paths");
  p->add_option("--threads", pr.threads, "worker threads (0: all cores)");
  p->add_option("--coeffs", pr.coeffs, "patch files");
  add_output_opts(p, pr.out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) return cmd_gen_coeffs(gen);
    if (*v) return cmd_validate_coeffs(val);
    if (*s) return cmd_sample(smp);
    if (*m) return cmd_moments(mom);
    if (*p) return cmd_price(pr);
  } catch (const std::exception& e) {
    std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
