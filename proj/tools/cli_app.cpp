#include "cli_app.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wchaos/applications.hpp"
#include "wchaos/cumulants.hpp"
#include "wchaos/deviations.hpp"
#include "wchaos/diagrams.hpp"
#include "wchaos/kernel_io.hpp"
#include "wchaos/montecarlo.hpp"

namespace wchaos::cli {

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCap = 3;
constexpr int kExitParse = 4;

struct OutputOptions {
  std::string format = "json";
  std::string out_path;
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--out", opts.out_path, "Write output to a file instead of stdout");
}

void emit(const OutputOptions& opts, std::ostream& fallback, const std::string& text) {
  if (opts.out_path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream file(opts.out_path);
  if (!file) throw ParseError("cannot open output file: " + opts.out_path);
  file << text;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json json_number(const BigInt& value) {
  if (value >= 0 && value <= BigInt(std::numeric_limits<std::int64_t>::max()))
    return value.convert_to<std::int64_t>();
  return value.str();  // exact decimal string beyond 64 bits
}

ordered_json rng_json(const RngSpec& spec) {
  return ordered_json{
      {"seed", spec.seed}, {"stream", spec.stream}, {"algorithm", spec.algorithm}};
}

ordered_json deviation_json(const DeviationParams& p) {
  ordered_json j{{"q", p.q}, {"gamma", p.gamma}, {"alpha", p.alpha}};
  if (p.K) j["K"] = *p.K;
  if (p.L) j["L"] = *p.L;
  j["delta"] = p.delta_unbounded ? ordered_json("unbounded") : ordered_json(p.delta);
  j["constants_flagged"] =
      p.constants_unspecified ? ordered_json::array({"unspecified-constant"})
                              : ordered_json::array();
  return j;
}

SymmetricKernel load_kernel(const std::string& path) {
  if (path == "-") return read_kernel(std::cin);
  return read_kernel_file(path);
}

SymmetricKernel hermite_sum_kernel(int q, int n) {
  SymmetricKernel h(q, n);
  for (int k = 0; k < n; ++k)
    h.set(IndexTuple(static_cast<std::size_t>(q), static_cast<std::uint16_t>(k)),
          1.0 / std::sqrt(static_cast<double>(n)));
  return h;
}

// ---------------------------------------------------------------- diagrams

struct DiagramsArgs {
  int q = 0, m = 0;
  std::string groups;
  int cap = 20;
  std::uint64_t limit = 0;
  OutputOptions out;
};

GroupedIndexSet make_groups(const DiagramsArgs& a) {
  if (!a.groups.empty()) {
    std::vector<int> sizes;
    std::stringstream ss(a.groups);
    std::string tok;
    while (std::getline(ss, tok, ','))
      sizes.push_back(std::stoi(tok));
    return GroupedIndexSet(sizes);
  }
  if (a.q < 1 || a.m < 1)
    throw CLI::ValidationError("diagrams", "need --q and --m (or --groups)");
  return GroupedIndexSet::uniform(a.q, a.m);
}

void setup_diagrams(CLI::App& app, std::ostream& out) {
  auto* cmd = app.add_subcommand("diagrams", "Enumerate or count pair partitions");
  auto args = std::make_shared<DiagramsArgs>();

  auto* count = cmd->add_subcommand("count", "Count partitions with sandwich bounds");
  count->add_option("--q", args->q, "Group size (order of the chaos)");
  count->add_option("--m", args->m, "Number of groups (cumulant order)");
  count->add_option("--groups", args->groups, "Comma-separated group sizes");
  add_output_options(count, args->out);
  count->callback([args, &out] {
    const auto groups = make_groups(*args);
    const BigInt n = count_partitions(groups);
    ordered_json j;
    if (args->groups.empty()) {
      j["q"] = args->q;
      j["m"] = args->m;
    } else {
      j["groups"] = args->groups;
    }
    j["count"] = json_number(n);
    if (args->groups.empty() && args->q >= 2 && args->m >= 3) {
      const auto b = count_bounds(args->q, args->m);
      j["lower"] = b.lower;
      j["upper"] = b.upper;
    }
    if (args->out.format == "csv") {
      std::ostringstream csv;
      csv << "q,m,count,lower,upper\n"
          << args->q << ',' << args->m << ',' << n.str() << ','
          << (j.contains("lower") ? format_double(j["lower"].get<double>()) : "") << ','
          << (j.contains("upper") ? format_double(j["upper"].get<double>()) : "")
          << "\n";
      emit(args->out, out, csv.str());
    } else {
      emit(args->out, out, j.dump(2) + "\n");
    }
  });

  auto* en = cmd->add_subcommand("enum", "Stream partitions, one per line");
  en->add_option("--q", args->q, "Group size");
  en->add_option("--m", args->m, "Number of groups");
  en->add_option("--groups", args->groups, "Comma-separated group sizes");
  en->add_option("--cap", args->cap, "Total index cap for enumeration")
      ->capture_default_str();
  en->add_option("--limit", args->limit, "Stop after this many partitions");
  add_output_options(en, args->out);
  en->callback([args, &out] {
    const auto groups = make_groups(*args);
    EnumerationOptions opts;
    opts.max_total = args->cap;
    std::ostringstream lines;
    std::uint64_t count = 0;
    enumerate_partitions(groups,
                         [&](const PairPartition& p) {
                           lines << p.to_string() << "\n";
                           ++count;
                           return args->limit == 0 || count < args->limit;
                         },
                         opts);
    emit(args->out, out, lines.str());
  });

  cmd->require_subcommand(1);
}

// ---------------------------------------------------------------- matching

void setup_matching(CLI::App& app, std::ostream& out) {
  auto* cmd = app.add_subcommand("matching", "Matching numbers and the L(q,m) bound");
  auto args = std::make_shared<DiagramsArgs>();
  auto partition_text = std::make_shared<std::string>();

  auto* bound = cmd->add_subcommand("bound", "L(q,m) and alpha(q)");
  bound->add_option("--q", args->q, "Chaos order")->required();
  bound->add_option("--m", args->m, "Cumulant order")->required();
  add_output_options(bound, args->out);
  bound->callback([args, &out] {
    const int L = matching_lower_bound(args->q, args->m);
    const BigRational a = alpha(args->q);
    ordered_json j{{"q", args->q},
                   {"m", args->m},
                   {"L", L},
                   {"alpha", a.str()},
                   {"alpha_value", alpha_value(args->q)}};
    emit(args->out, out, j.dump(2) + "\n");
  });

  auto* number = cmd->add_subcommand("number", "Matching number of a diagram");
  number->add_option("--partition", *partition_text, "Pair list, e.g. \"(1,4)(2,5)(3,6)\"")
      ->required();
  number->add_option("--q", args->q, "Group size of the underlying index set")
      ->required();
  add_output_options(number, args->out);
  number->callback([args, partition_text, &out] {
    const auto p = PairPartition::parse(*partition_text);
    const int total = static_cast<int>(p.pairs.size()) * 2;
    if (args->q < 1 || total % args->q != 0)
      throw CLI::ValidationError("matching", "pair count incompatible with --q");
    const auto groups = GroupedIndexSet::uniform(args->q, total / args->q);
    if (!is_valid_partition(p, groups))
      throw CLI::ValidationError("matching",
                                 "partition violates the group/connectivity rules");
    const auto g = partition_to_multigraph(p, groups);
    ordered_json j{{"vertices", g.vertices},
                   {"edges", g.edge_count()},
                   {"matching", matching_number(g)},
                   {"regular", g.regular(args->q)},
                   {"connected", g.connected()}};
    emit(args->out, out, j.dump(2) + "\n");
  });

  cmd->require_subcommand(1);
}

// ---------------------------------------------------------------- cumulant

struct CumulantArgs {
  std::string kernel_path;
  int hermite_n = 0;
  int random_dim = 0;
  int q = 2;
  int m = 4;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  int workers = 1;
  int bootstrap = 100;
  OutputOptions out;
};

SymmetricKernel cumulant_kernel(const CumulantArgs& a) {
  if (!a.kernel_path.empty()) return load_kernel(a.kernel_path);
  if (a.hermite_n > 0) return hermite_sum_kernel(a.q, a.hermite_n);
  if (a.random_dim > 0) {
    RngStream rng(a.seed, a.stream);
    SymmetricKernel h(a.q, a.random_dim);
    IndexTuple idx(a.q, 0);
    for (;;) {
      if (std::is_sorted(idx.begin(), idx.end()))
        h.set(idx, 2.0 * rng.uniform01() - 1.0);
      int pos = a.q - 1;
      while (pos >= 0 && idx[pos] == a.random_dim - 1) idx[pos--] = 0;
      if (pos < 0) break;
      ++idx[pos];
    }
    return normalize(h);
  }
  throw CLI::ValidationError("cumulant",
                             "need --kernel FILE, --hermite-sum N or --random");
}

ordered_json cumulant_report_json(const SymmetricKernel& h, int m,
                                  std::optional<double> exact,
                                  const std::optional<CumulantEstimate>& emp) {
  ordered_json j{{"q", h.order()}, {"m", m}};
  if (exact) j["exact"] = *exact;
  // low-order cross-checks: cum1 = 0 by centering, cum2 = q! |h|^2
  j["cum1"] = 0.0;
  j["cum2"] = exact_cumulant(h, 2);
  if (emp) {
    j["empirical"] = emp->value;
    j["se"] = emp->std_error;
    j["biased"] = emp->biased;
  }
  if (is_normalized(h, 1e-9) && m >= 3) {
    const double K = compute_K(h);
    j["K"] = K;
    j["term_bound"] = std::pow(K, matching_lower_bound(h.order(), m));
    j["aggregate_bound"] = cumulant_bound(h.order(), m, K).value;
  }
  return j;
}

void setup_cumulant(CLI::App& app, std::ostream& out) {
  auto* cmd = app.add_subcommand("cumulant", "Exact and Monte Carlo cumulants");
  auto args = std::make_shared<CumulantArgs>();

  const auto add_kernel_options = [&args](CLI::App* sub) {
    sub->add_option("--kernel", args->kernel_path, "Kernel file ('-' for stdin)");
    sub->add_option("--hermite-sum", args->hermite_n,
                    "Use the Hermite-sum kernel with this n");
    sub->add_option("--random", args->random_dim, "Random normalized kernel with dim N");
    sub->add_option("--N", args->random_dim, "Alias for --random dimension");
    sub->add_option("--q", args->q, "Kernel order for generated kernels")
        ->capture_default_str();
    sub->add_option("--m", args->m, "Cumulant order")->capture_default_str();
  };

  auto* exact = cmd->add_subcommand("exact", "Diagram-formula cumulant");
  add_kernel_options(exact);
  add_output_options(exact, args->out);
  exact->add_option("--seed", args->seed, "Seed for --random kernels")
      ->envname("WCHAOS_SEED");
  exact->callback([args, &out] {
    const auto h = cumulant_kernel(*args);
    const double value = exact_cumulant(h, args->m);
    emit(args->out, out,
         cumulant_report_json(h, args->m, value, std::nullopt).dump(2) + "\n");
  });

  auto* mc = cmd->add_subcommand("mc", "Monte Carlo cumulant estimates");
  add_kernel_options(mc);
  mc->add_option("--samples", args->samples, "Sample count")->capture_default_str();
  mc->add_option("--seed", args->seed, "RNG seed")->envname("WCHAOS_SEED");
  mc->add_option("--stream", args->stream, "RNG stream id");
  mc->add_option("--workers", args->workers, "Worker threads (does not affect values)");
  mc->add_option("--bootstrap", args->bootstrap, "Bootstrap rounds for standard errors")
      ->capture_default_str();
  add_output_options(mc, args->out);
  mc->callback([args, &out] {
    if (args->samples == 0) throw CLI::ValidationError("cumulant", "need --samples > 0");
    const auto h = cumulant_kernel(*args);
    const ChaosSampler sampler(h);
    const std::uint64_t block = 1 << 14;
    const std::uint64_t blocks = (args->samples + block - 1) / block;
    std::vector<std::function<std::vector<double>()>> tasks;
    for (std::uint64_t b = 0; b < blocks; ++b) {
      const std::uint64_t count = std::min<std::uint64_t>(block, args->samples - b * block);
      tasks.push_back([&, b, count] {
        RngStream rng(args->seed, substream(args->stream, b));
        std::vector<double> xs(count);
        for (auto& x : xs) x = sampler.sample(rng);
        return xs;
      });
    }
    const auto chunks = run_batch(tasks, args->workers);
    std::vector<double> xs;
    xs.reserve(args->samples);
    for (const auto& c : chunks) xs.insert(xs.end(), c.begin(), c.end());

    EmpiricalOptions eopts;
    eopts.bootstrap_rounds = args->bootstrap;
    eopts.seed = args->seed ^ 0xB007ULL;
    const auto est = empirical_cumulants(xs, std::min(args->m, 6), eopts);
    std::optional<double> exact_value;
    try {
      exact_value = exact_cumulant(h, args->m);
    } catch (const CapExceeded&) {
      // exact value unavailable at this size; report the estimate alone
    }
    auto j = cumulant_report_json(h, args->m, exact_value,
                                  est[static_cast<std::size_t>(args->m - 1)]);
    j["samples"] = args->samples;
    RngSpec spec;
    spec.seed = args->seed;
    spec.stream = args->stream;
    j["rng"] = rng_json(spec);
    emit(args->out, out, j.dump(2) + "\n");
  });

  cmd->require_subcommand(1);
}

// ------------------------------------------------------------------ bounds

struct BoundsArgs {
  int q = 2;
  double z = 0.0;
  double K = -1.0;
  double L = -1.0;
  double delta = 0.0;
  double c = 1.0;
  double p = 0.0;
  double gamma = 0.0;
  OutputOptions out;
};

void setup_bounds(CLI::App& app, std::ostream& out) {
  auto* cmd = app.add_subcommand("bounds", "Deviation parameters and tail bounds");
  auto args = std::make_shared<BoundsArgs>();

  const auto emit_record = [args, &out](const std::string& name, ordered_json inputs,
                                        const ordered_json& value,
                                        std::vector<std::string> flagged = {}) {
    ordered_json j{{"name", name},
                   {"inputs", std::move(inputs)},
                   {"value", value},
                   {"constants_flagged", flagged}};
    emit(args->out, out, j.dump(2) + "\n");
  };

  auto* delta = cmd->add_subcommand("delta", "Delta from K or L");
  delta->add_option("--q", args->q)->required();
  delta->add_option("--K", args->K, "Maximal contraction norm");
  delta->add_option("--L", args->L, "cum4 surrogate");
  add_output_options(delta, args->out);
  delta->callback([args, emit_record] {
    if ((args->K >= 0.0) == (args->L >= 0.0))
      throw CLI::ValidationError("bounds", "provide exactly one of --K or --L");
    const auto p = args->K >= 0.0 ? delta_from_K(args->q, args->K)
                                  : delta_from_L(args->q, args->L);
    emit_record("delta",
                ordered_json{{"q", args->q},
                             {args->K >= 0.0 ? "K" : "L", args->K >= 0.0 ? args->K : args->L}},
                deviation_json(p));
  });

  auto* tail = cmd->add_subcommand("tail", "Two-branch exponential tail bound");
  tail->add_option("--z", args->z)->required();
  tail->add_option("--q", args->q)->capture_default_str();
  tail->add_option("--delta", args->delta, "Deviation scale")->capture_default_str();
  add_output_options(tail, args->out);
  tail->callback([args, emit_record] {
    const double d = args->delta > 0.0 ? args->delta
                                       : std::numeric_limits<double>::infinity();
    emit_record("tail_bound",
                ordered_json{{"q", args->q}, {"z", args->z}, {"delta", d}},
                tail_bound(args->z, args->q, d));
  });

  auto* major = cmd->add_subcommand("major", "Weibull-type tail estimate");
  major->add_option("--z", args->z)->required();
  major->add_option("--q", args->q)->capture_default_str();
  major->add_option("--c", args->c, "Unspecified constant")->capture_default_str();
  major->add_option("--delta", args->delta, "Also compare against tail bound");
  add_output_options(major, args->out);
  major->callback([args, emit_record] {
    ordered_json value = major_bound(args->z, args->q, args->c);
    ordered_json inputs{{"q", args->q}, {"z", args->z}, {"c", args->c}};
    if (args->delta > 0.0) {
      value = ordered_json{{"major", major_bound(args->z, args->q, args->c)},
                           {"tail", tail_bound(args->z, args->q, args->delta)},
                           {"tail_beats_major",
                            tail_beats_major(args->z, args->q, args->delta, args->c)}};
      inputs["delta"] = args->delta;
    }
    emit_record("major_bound", inputs, value, {"c"});
  });

  auto* ratio = cmd->add_subcommand("ratio", "Log-ratio diagnostic vs Gaussian tail");
  ratio->add_option("--p", args->p, "Estimated tail probability")->required();
  ratio->add_option("--z", args->z)->required();
  ratio->add_option("--q", args->q)->capture_default_str();
  ratio->add_option("--delta", args->delta)->required();
  add_output_options(ratio, args->out);
  ratio->callback([args, emit_record] {
    const auto d = ratio_diagnostic(args->p, args->z, args->q, args->delta);
    emit_record("ratio_diagnostic",
                ordered_json{{"q", args->q},
                             {"z", args->z},
                             {"p", args->p},
                             {"delta", args->delta}},
                ordered_json{{"log_ratio_abs", d.log_ratio_abs}, {"shape", d.shape}},
                {"c0", "c1", "c2"});
  });

  auto* rate = cmd->add_subcommand("rate", "Gaussian rate function z^2/(2 q!)");
  rate->add_option("--z", args->z)->required();
  rate->add_option("--q", args->q)->capture_default_str();
  add_output_options(rate, args->out);
  rate->callback([args, emit_record] {
    emit_record("rate_function", ordered_json{{"q", args->q}, {"z", args->z}},
                rate_function(args->z, args->q));
  });

  auto* window = cmd->add_subcommand("window", "Scale-window trend classification");
  auto n_grid = std::make_shared<std::vector<double>>();
  auto a_grid = std::make_shared<std::vector<double>>();
  auto delta_grid = std::make_shared<std::vector<double>>();
  window->add_option("--q", args->q)->capture_default_str();
  window->add_option("--n-grid", *n_grid, "Index grid")->required()->expected(-1);
  window->add_option("--a-grid", *a_grid, "Scale values a_n")->required()->expected(-1);
  window->add_option("--delta-grid", *delta_grid, "Delta_n values")
      ->required()
      ->expected(-1);
  add_output_options(window, args->out);
  window->callback([args, n_grid, a_grid, delta_grid, &out] {
    ScaleSequence a{*n_grid, *a_grid, ""};
    const auto report = mdp_scale_check(a, *delta_grid, args->q);
    const char* verdict = report.verdict == MdpVerdict::Window      ? "window"
                          : report.verdict == MdpVerdict::NoWindow ? "no-window"
                                                                   : "indeterminate";
    ordered_json j{{"name", "scale_window"},
                   {"inputs", ordered_json{{"q", args->q}, {"points", n_grid->size()}}},
                   {"value",
                    ordered_json{{"verdict", verdict},
                                 {"ratio_slope", report.ratio_slope},
                                 {"scale_slope", report.scale_slope},
                                 {"no_window_exponent", report.no_window_exponent},
                                 {"dead_band", report.dead_band}}},
                   {"constants_flagged", ordered_json::array()}};
    emit(args->out, out, j.dump(2) + "\n");
  });

  auto* be = cmd->add_subcommand("berry-esseen", "Constant-free Berry-Esseen shape");
  be->add_option("--delta", args->delta)->required();
  be->add_option("--gamma", args->gamma)->capture_default_str();
  add_output_options(be, args->out);
  be->callback([args, emit_record] {
    emit_record("berry_esseen_shape",
                ordered_json{{"delta", args->delta}, {"gamma", args->gamma}},
                berry_esseen_shape(args->delta, args->gamma), {"c"});
  });

  cmd->require_subcommand(1);
}

// --------------------------------------------------------------------- app

struct AppArgs {
  int d = 1;
  long long n = 0;
  double hurst = 0.5;
  double c_h = 1.0;
  std::vector<long long> l;
  long long u = -1, v = -1;
  bool quad_check = false;
  bool emit_path = false;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  OutputOptions out;
};

void setup_app(CLI::App& app, std::ostream& out) {
  auto* cmd = app.add_subcommand("app", "Worked models: sheet, fbm, bispectrum");
  auto args = std::make_shared<AppArgs>();

  auto* sheet = cmd->add_subcommand("sheet", "Brownian sheet explosive integral");
  sheet->add_option("--d", args->d, "Sheet dimension")->capture_default_str();
  sheet->add_option("--n", args->n, "Cutoff index")->required();
  sheet->add_flag("--quad-check", args->quad_check,
                  "Also report the quadrature variance cross-check");
  add_output_options(sheet, args->out);
  sheet->callback([args, &out] {
    const BrownianSheetModel model(args->d, args->n);
    ordered_json j{{"d", args->d},
                   {"n", args->n},
                   {"mean", model.mean()},
                   {"variance", model.variance()},
                   {"k_bound", model.k_bound()},
                   {"deviation", deviation_json(model.deviation())}};
    if (args->quad_check) {
      const double quad = sheet_variance_quadrature(args->d, args->n);
      j["variance_quadrature"] = quad;
      j["quadrature_rel_err"] = std::abs(quad - model.variance()) / model.variance();
    }
    emit(args->out, out, j.dump(2) + "\n");
  });

  auto* fbm = cmd->add_subcommand("fbm", "Fractional Brownian motion power variation");
  fbm->add_option("--H", args->hurst, "Hurst index in (0, 3/4]")->required();
  fbm->add_option("--n", args->n, "Sample count")->required();
  fbm->add_option("--c-H", args->c_h, "Unspecified rate constant")
      ->capture_default_str();
  fbm->add_flag("--emit-path", args->emit_path, "Emit one increment path as CSV");
  fbm->add_option("--seed", args->seed, "Seed for --emit-path")->envname("WCHAOS_SEED");
  fbm->add_option("--stream", args->stream, "Stream for --emit-path");
  add_output_options(fbm, args->out);
  fbm->callback([args, &out] {
    const FbmModel model(args->hurst, args->n);
    if (args->emit_path) {
      const FbmSampler sampler(model);
      RngStream rng(args->seed, args->stream);
      const auto path = sampler.sample_increments(rng);
      std::ostringstream csv;
      csv << "k,increment\n";
      for (long long k = 0; k < args->n; ++k)
        csv << k << ',' << format_double(path(k)) << "\n";
      emit(args->out, out, csv.str());
      return;
    }
    ordered_json j{{"H", args->hurst},
                   {"n", args->n},
                   {"sigma", model.sigma()},
                   {"rate", model.rate(args->c_h)},
                   {"deviation", deviation_json(model.deviation(args->c_h))}};
    emit(args->out, out, j.dump(2) + "\n");
  });

  auto* bis = cmd->add_subcommand("bispectrum", "Sample bispectrum parameters");
  bis->add_option("--l", args->l, "Frequency triple l1 l2 l3")->expected(3);
  bis->add_option("--n", args->n, "Sequence index (uses u = v = 2n defaults)");
  bis->add_option("--u", args->u, "Middle frequency");
  bis->add_option("--v", args->v, "Top frequency");
  add_output_options(bis, args->out);
  bis->callback([args, &out] {
    ordered_json j;
    if (!args->l.empty()) {
      const BispectrumModel model(args->l[0], args->l[1], args->l[2]);
      j["l"] = args->l;
      j["D"] = model.variance_factor();
    } else if (args->n > 0) {
      long long u = args->u >= 0 ? args->u : args->n;
      long long v = args->v >= 0 ? args->v : args->n + ((args->n + u) % 2 == 0 ? 0 : 1);
      const auto model = BispectrumModel::from_sequence(args->n, u, v);
      j["l"] = {model.l1, model.l2, model.l3};
      j["D"] = model.variance_factor();
      j["deviation"] = deviation_json(bispectrum_deviation(args->n));
    } else {
      throw CLI::ValidationError("bispectrum", "need --l L1 L2 L3 or --n N");
    }
    emit(args->out, out, j.dump(2) + "\n");
  });

  cmd->require_subcommand(1);
}

// ---------------------------------------------------------------------- mc

struct McArgs {
  std::string model = "hermite-sum";
  int q = 2;
  long long n = 100;
  double hurst = 0.5;
  std::string kernel_path;
  std::vector<double> z;
  std::vector<double> a;
  std::vector<long long> n_grid;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  int workers = 1;
  bool two_sided = false;
  bool exact = false;
  OutputOptions out;
};

struct ModelBundle {
  Sampler sampler;
  std::function<double(double)> exact_tail;  // may be empty
  std::optional<double> delta;               // for bound columns
};

ModelBundle make_model(const McArgs& a, long long n) {
  ModelBundle b;
  if (a.model == "hermite-sum") {
    auto sampler = std::make_shared<HermiteSumSampler>(a.q, n);
    b.sampler = [sampler](RngStream& rng) { return sampler->sample(rng); };
    if (sampler->chi_square_route())
      b.exact_tail = [sampler](double z) { return sampler->exact_tail(z); };
    b.delta = delta_from_K(a.q, 1.0 / std::sqrt(static_cast<double>(n))).delta;
  } else if (a.model == "gaussian") {
    const double qfact = std::tgamma(a.q + 1.0);
    b.sampler = [qfact](RngStream& rng) { return std::sqrt(qfact) * rng.normal(); };
    b.exact_tail = [qfact](double z) { return gaussian_tail(z, qfact); };
  } else if (a.model == "fbm") {
    auto sampler = std::make_shared<FbmSampler>(FbmModel(a.hurst, n));
    b.sampler = [sampler](RngStream& rng) { return sampler->sample(rng); };
    b.delta = fbm_deviation(a.hurst, n, 1.0).delta;
  } else if (a.model == "kernel") {
    if (a.kernel_path.empty())
      throw CLI::ValidationError("mc", "--model kernel needs --kernel FILE");
    auto sampler = std::make_shared<ChaosSampler>(load_kernel(a.kernel_path));
    if (is_normalized(sampler->kernel(), 1e-9))
      b.delta = delta_from_K(sampler->order(), compute_K(sampler->kernel())).delta;
    b.sampler = [sampler](RngStream& rng) { return sampler->sample(rng); };
  } else {
    throw CLI::ValidationError("mc", "unknown model: " + a.model);
  }
  return b;
}

void setup_mc(CLI::App& app, std::ostream& out) {
  auto* cmd = app.add_subcommand("mc", "Monte Carlo tail and scale diagnostics");
  auto args = std::make_shared<McArgs>();

  const auto add_model_options = [&args](CLI::App* sub) {
    sub->add_option("--model", args->model, "hermite-sum | gaussian | fbm | kernel")
        ->capture_default_str();
    sub->add_option("--q", args->q, "Chaos order")->capture_default_str();
    sub->add_option("--H", args->hurst, "Hurst index for --model fbm");
    sub->add_option("--kernel", args->kernel_path, "Kernel file for --model kernel");
    sub->add_option("--samples", args->samples)->capture_default_str();
    sub->add_option("--seed", args->seed)->envname("WCHAOS_SEED");
    sub->add_option("--stream", args->stream, "Base RNG stream id");
    sub->add_option("--workers", args->workers,
                    "Worker threads (never affects values)");
  };

  auto* tail = cmd->add_subcommand("tail", "Tail probabilities with binomial CIs");
  add_model_options(tail);
  tail->add_option("--n", args->n, "Model size n")->capture_default_str();
  tail->add_option("--z", args->z, "Thresholds")->required()->expected(-1);
  tail->add_flag("--two-sided", args->two_sided, "Estimate P(|F| >= z)");
  add_output_options(tail, args->out);
  tail->callback([args, &out] {
    if (args->samples < 100)
      throw CLI::ValidationError("mc", "need --samples >= 100");
    if (!verify_wick_rule())
      throw std::runtime_error("wick evaluation self-test failed");
    const auto bundle = make_model(*args, args->n);
    ordered_json rows = ordered_json::array();
    std::ostringstream csv;
    csv << "z,samples,hits,p_hat,ci_low,ci_high,two_sided,censored,bound,seed,stream,"
           "algorithm\n";
    std::uint64_t z_index = 0;
    for (const double z : args->z) {
      RngSpec spec;
      spec.seed = args->seed;
      spec.stream = substream(args->stream, 0x7A11 + z_index);
      const auto est =
          estimate_tail(bundle.sampler, z, args->samples, spec, args->two_sided,
                        args->workers);
      const double bound =
          bundle.delta ? tail_bound(z, args->q, *bundle.delta)
                       : std::numeric_limits<double>::quiet_NaN();
      rows.push_back(ordered_json{{"z", z},
                                  {"samples", est.samples},
                                  {"hits", est.hits},
                                  {"p_hat", est.p_hat},
                                  {"ci_low", est.ci_low},
                                  {"ci_high", est.ci_high},
                                  {"two_sided", est.two_sided_event},
                                  {"censored", est.censored},
                                  {"bound", bound},
                                  {"rng", rng_json(est.rng)}});
      csv << format_double(z) << ',' << est.samples << ',' << est.hits << ','
          << format_double(est.p_hat) << ',' << format_double(est.ci_low) << ','
          << format_double(est.ci_high) << ',' << (est.two_sided_event ? 1 : 0) << ','
          << (est.censored ? 1 : 0) << ',' << format_double(bound) << ','
          << est.rng.seed << ',' << est.rng.stream << ',' << est.rng.algorithm << "\n";
      ++z_index;
    }
    emit(args->out, out,
         args->out.format == "csv" ? csv.str() : rows.dump(2) + "\n");
  });

  auto* mdp = cmd->add_subcommand("mdp", "Scaled log-tail table");
  add_model_options(mdp);
  mdp->add_option("--n-grid", args->n_grid, "Model sizes")->expected(-1);
  mdp->add_option("--a-grid", args->a, "Scales a_n")->required()->expected(-1);
  mdp->add_option("--z-grid", args->z, "Thresholds")->required()->expected(-1);
  mdp->add_flag("--exact", args->exact,
                "Use exact tails where the model provides them");
  add_output_options(mdp, args->out);
  mdp->callback([args, &out] {
    if (!verify_wick_rule())
      throw std::runtime_error("wick evaluation self-test failed");
    std::vector<long long> sizes =
        args->n_grid.empty() ? std::vector<long long>{args->n} : args->n_grid;
    std::vector<MdpModel> family;
    for (long long n : sizes) {
      auto bundle = make_model(*args, n);
      MdpModel m;
      m.n = static_cast<double>(n);
      m.label = args->model;
      if (args->exact) {
        if (!bundle.exact_tail)
          throw CLI::ValidationError("mc", "--exact unavailable for this model");
        m.exact_tail = bundle.exact_tail;
      } else {
        m.sampler = bundle.sampler;
      }
      family.push_back(std::move(m));
    }
    MdpCurveOptions opts;
    opts.samples = args->samples;
    opts.rng.seed = args->seed;
    opts.rng.stream = args->stream;
    opts.workers = args->workers;
    const auto cells = mdp_curve(family, args->a, args->z, args->q, opts);

    std::ostringstream csv;
    csv << "n,a,z,p,scaled_log,rate_target,method,censored,samples,hits,seed,stream,"
           "algorithm\n";
    ordered_json rows = ordered_json::array();
    for (const auto& c : cells) {
      rows.push_back(ordered_json{{"n", c.n},
                                  {"a", c.a},
                                  {"z", c.z},
                                  {"p", c.p},
                                  {"scaled_log", c.censored ? ordered_json("censored")
                                                            : ordered_json(c.scaled_log)},
                                  {"rate_target", c.rate_target},
                                  {"method", c.method},
                                  {"censored", c.censored},
                                  {"rng", rng_json(opts.rng)}});
      csv << format_double(c.n) << ',' << format_double(c.a) << ','
          << format_double(c.z) << ',' << format_double(c.p) << ','
          << (c.censored ? "censored" : format_double(c.scaled_log)) << ','
          << format_double(c.rate_target) << ',' << c.method << ','
          << (c.censored ? 1 : 0) << ',' << c.samples << ',' << c.hits << ','
          << opts.rng.seed << ',' << opts.rng.stream << ',' << opts.rng.algorithm
          << "\n";
    }
    emit(args->out, out,
         args->out.format == "csv" ? csv.str() : rows.dump(2) + "\n");
  });

  auto* selftest = cmd->add_subcommand("selftest", "Wick evaluation self-test");
  selftest->add_option("--seed", args->seed)->envname("WCHAOS_SEED");
  add_output_options(selftest, args->out);
  selftest->callback([args, &out] {
    const bool ok = verify_wick_rule(args->seed ? args->seed : 1);
    emit(args->out, out, ordered_json{{"wick_rule_ok", ok}}.dump(2) + "\n");
    if (!ok) throw std::runtime_error("wick evaluation self-test failed");
  });

  cmd->require_subcommand(1);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cumulant, diagram and deviation-bound toolkit for Wiener chaos"};
  app.set_config("--config", "", "Read defaults from a key=value file");
  app.require_subcommand(1);

  setup_diagrams(app, out);
  setup_matching(app, out);
  setup_cumulant(app, out);
  setup_bounds(app, out);
  setup_app(app, out);
  setup_mc(app, out);

  try {
    app.parse(argc, argv);
    return kExitOk;
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapExceeded& e) {
    err << "resource cap: " << e.what() << "\n";
    return kExitCap;
  } catch (const ParseError& e) {
    err << "input parse: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace wchaos::cli
