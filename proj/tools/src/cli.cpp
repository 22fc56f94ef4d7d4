// SPDX-FileCopyrightText: © 2026 connectikit contributors
//
// SPDX-License-Identifier: Apache-2.0

#include "connectikit_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "connectikit/arrangement.hpp"
#include "connectikit/construction.hpp"
#include "connectikit/error.hpp"
#include "connectikit/io.hpp"
#include "connectikit/optimizers.hpp"
#include "connectikit/paths.hpp"
#include "svg.hpp"

namespace connectikit::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct GenDataOpts {
  std::string mode = "teacher";
  std::size_t n = 64;
  std::size_t d = 0;
  std::size_t teacher_width = 8;
  double L = 0.0;
  std::string out = ".";
};

struct TrainOpts {
  std::string data;
  std::string optimizer = "adamw";
  std::size_t width = 8;
  double eta = 1e-3;
  double lambda = 0.0;
  double mu = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t steps = 1000;
  double init_scale = 0.5;
  bool newton_schulz = false;
  std::string out = ".";
};

struct ConnectOpts {
  std::string a;
  std::string b;
  std::string data;
  std::string eval_data;
  std::string method = "linear";
  std::string align = "none";
  std::string norm = "frobenius";
  double lambda = 0.0;
  std::size_t samples = 1001;
  std::size_t iterations = 2000;
  double lr = 1e-2;
  double t_lo = 0.4;
  double t_hi = 0.6;
  std::size_t cap = 8;
  double tol = kMembershipTol;
  std::string out = ".";
};

struct ReportOpts {
  std::string profile;
  std::string spectra;
  std::string title = "path profile";
  std::string out = ".";
};

struct AnalyzeOpts {
  std::string mode;
  std::string data;
  double lambda = 1.0;
  std::string norm = "maxentry";
  std::size_t cap = 8;
  std::size_t width = 0;
  std::size_t m0 = 1;
  double lambda_fit = 0.0;
  std::size_t m_star = 0;
  double big_m = 0.0;
  std::size_t restarts = 4;
  std::size_t d = 16;
  double L = 0.0;
  std::string norm1 = "frobenius";
  double lambda1 = 1.0;
  std::string norm2 = "operator";
  double lambda2 = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t iters = 8;
  std::string out = ".";
};

std::string g17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string bits(const Pattern& p) {
  std::string s;
  for (auto b : p) s += b ? '1' : '0';
  return s;
}

std::string sigma_str(const Sigma& s) {
  std::string out;
  for (int v : s) out += v > 0 ? '+' : '-';
  return out;
}

std::string matrix_json(const Mat& a) {
  std::ostringstream os;
  os << '[';
  for (std::size_t r = 0; r < a.rows(); ++r) {
    os << (r ? ",\n    [" : "\n    [");
    for (std::size_t c = 0; c < a.cols(); ++c) os << (c ? ", " : "") << format_double(a(r, c));
    os << ']';
  }
  os << "\n  ]";
  return os.str();
}

void write_manifest(const fs::path& dir, const GlobalOpts& g, const CLI::App& sub) {
  std::ostringstream os;
  os << "# connectikit run manifest; replay with: connectikit --config <this file>\n";
  os << "seed=" << g.seed << "\nthreads=" << g.threads << "\n[" << sub.get_name() << "]\n";
  os << sub.config_to_str(true, false);
  write_file(dir / "manifest.ini", os.str());
}

RegSetSpec profile_spec(const std::string& norm, double lambda, std::size_t width) {
  RegSetSpec spec{parse_norm_kind(norm), lambda > 0.0 ? lambda : 1.0, width};
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------

void cmd_gen_data(const GenDataOpts& o, const GlobalOpts& g, std::ostream& out) {
  const fs::path dir(o.out);
  if (o.mode == "toy") {
    const Dataset toy{Mat{{1.0}, {-1.0}}, Vec{1.0, 1.0}};
    save_dataset(dir / "dataset.json", toy);
    out << "wrote " << (dir / "dataset.json").string() << " (n=2, d=1)\n";
    return;
  }
  if (o.mode != "teacher" && o.mode != "finite") {
    throw UsageError("gen-data: --mode must be teacher, finite or toy");
  }
  if (o.d == 0) throw UsageError("gen-data: --d is required");
  if (o.mode == "teacher") {
    const TeacherProblem tp = gen_teacher_data(g.seed, o.n, o.d, o.teacher_width);
    save_dataset(dir / "dataset.json", tp.data);
    Checkpoint ck{tp.teacher, {{"kind", std::string("teacher")}, {"seed", static_cast<double>(g.seed)}}};
    save_checkpoint(dir / "teacher.json", ck);
    out << "wrote " << (dir / "dataset.json").string() << " (n=" << o.n << ", d=" << o.d << ") and "
        << (dir / "teacher.json").string() << " (width " << o.teacher_width << ")\n";
    return;
  }
  const double L = o.L > 0.0 ? o.L : std::sqrt(static_cast<double>(o.d)) / 2.0;
  const Construction c = build_construction(o.d, L);
  Mat ab = matmul(c.a, c.b);
  for (std::size_t i = 0; i < o.d; ++i) ab(i, i) -= 1.0;
  const double residual = matrix_norm(ab, NormKind::MaxEntry);
  save_dataset(dir / "dataset.json", c.data);
  std::ostringstream os;
  os << "{\n  \"d\": " << c.d << ",\n  \"L\": " << format_double(c.L) << ",\n  \"residual_AB_minus_I\": "
     << format_double(residual) << ",\n  \"B\": " << matrix_json(c.b) << ",\n  \"A\": " << matrix_json(c.a) << "\n}\n";
  write_file(dir / "construction.json", os.str());
  out << "wrote " << (dir / "dataset.json").string() << " (n=" << 2 * o.d << ", d=" << o.d << ") and "
      << (dir / "construction.json").string() << "\n";
  out << "L = " << g17(L) << "\nmax |A*B - I| = " << residual << "\n";
}

void cmd_train(const TrainOpts& o, const GlobalOpts& g, std::ostream& out) {
  const Dataset data = load_dataset(o.data);
  OptimizerConfig cfg;
  cfg.kind = parse_optimizer_kind(o.optimizer);
  cfg.eta = o.eta;
  cfg.lambda = o.lambda;
  cfg.mu = o.mu;
  cfg.beta1 = o.beta1;
  cfg.beta2 = o.beta2;
  cfg.eps = o.eps;
  cfg.steps = o.steps;
  cfg.newton_schulz = o.newton_schulz;
  cfg.validate();
  const TrainResult r = train(data, o.width, cfg, g.seed, o.init_scale);
  const fs::path dir(o.out);

  Checkpoint ck{r.net,
                {{"optimizer", std::string(to_string(cfg.kind))},
                 {"eta", cfg.eta},
                 {"lambda", cfg.lambda},
                 {"seed", static_cast<double>(g.seed)},
                 {"steps_run", static_cast<double>(r.steps_run)},
                 {"final_loss", r.losses.back()},
                 {"converged", r.converged}}};
  save_checkpoint(dir / "checkpoint.json", ck);

  std::ostringstream csv;
  csv << "step,loss\n";
  for (std::size_t k = 0; k < r.losses.size(); ++k) csv << k << ',' << format_double(r.losses[k]) << '\n';
  write_file(dir / "losses.csv", csv.str());

  std::ostringstream rep;
  if (cfg.lambda > 0.0) {
    const DualNormReport d = dual_norm_check(r.net, cfg);
    rep << "norm=" << to_string(d.norm) << "\nvalue_W=" << g17(d.value_w) << "\nvalue_alpha=" << g17(d.value_alpha)
        << "\nbound=" << g17(d.bound) << "\nslack=" << d.slack << "\npass=" << (d.pass ? "true" : "false") << '\n';
  } else {
    rep << "skipped=true\nreason=lambda is 0, no implicit-bias constraint\n";
  }
  write_file(dir / "dual_norm.txt", rep.str());

  out << "optimizer " << to_string(cfg.kind) << ": " << r.steps_run << " steps, final loss " << r.losses.back()
      << (r.converged ? " (converged)" : "") << '\n';
  out << rep.str();
}

void write_spectra(const fs::path& file, const PiecewisePath& path) {
  std::ostringstream os;
  os << "t,index,sigma\n";
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const SvdResult s = svd(path.at(t).w);
    for (std::size_t k = 0; k < s.sigma.size(); ++k) os << format_double(t) << ',' << k << ',' << format_double(s.sigma[k]) << '\n';
  }
  write_file(file, os.str());
}

void cmd_connect(const ConnectOpts& o, const GlobalOpts& g, std::ostream& out) {
  const TwoLayerNet a = load_checkpoint(o.a).net;
  TwoLayerNet b = load_checkpoint(o.b).net;
  const Dataset data = load_dataset(o.data);
  if (!a.same_shape(b)) throw UsageError("connect: endpoints have different shapes");
  if (a.input_dim() != data.d()) throw UsageError("connect: dataset dimension does not match the endpoints");
  if (o.samples < 2) throw UsageError("connect: --samples must be at least 2");

  if (o.align == "weights" || o.align == "activations") {
    const AlignMode mode = o.align == "weights" ? AlignMode::Weights : AlignMode::Activations;
    b = align_permutation(a, b, mode, &data).aligned;
  } else if (o.align != "none") {
    throw UsageError("connect: --align must be none, weights or activations");
  }

  const RegSetSpec spec = profile_spec(o.norm, o.lambda, a.width());
  PiecewisePath path;
  std::optional<double> linear_barrier;
  if (o.method == "linear") {
    path = linear_path(a, b);
  } else if (o.method == "polychain") {
    PolychainConfig pc;
    pc.iterations = o.iterations;
    pc.lr = o.lr;
    pc.t_lo = o.t_lo;
    pc.t_hi = o.t_hi;
    pc.seed = g.seed;
    path = polychain_fit(a, b, data, pc).path;
    linear_barrier = eval_path(linear_path(a, b), data, spec, o.samples, g.threads).barrier;
  } else if (o.method == "constructive") {
    if (!(o.lambda > 0.0)) throw UsageError("connect: --method constructive needs --lambda > 0");
    ConnectOptions copts;
    copts.tol = o.tol;
    copts.verify_samples = o.samples;
    copts.support_cap = o.cap;
    path = connect_intra(a, b, data, spec, copts);
  } else {
    throw UsageError("connect: --method must be linear, polychain or constructive");
  }

  const fs::path dir(o.out);
  const PathProfile prof = eval_path(path, data, spec, o.samples, g.threads);
  write_file(dir / "path.json", path_to_text(path));
  write_file(dir / "profile.csv", profile_to_csv(prof));
  write_spectra(dir / "spectra.csv", path);

  std::ostringstream sum;
  sum << "method=" << o.method << "\nalign=" << o.align << "\nnorm=" << to_string(spec.norm)
      << "\nsegments=" << path.size() << "\nsamples=" << o.samples << "\nbarrier=" << g17(prof.barrier)
      << "\nmax_loss=" << g17(prof.max_loss) << "\nmax_R_W=" << g17(prof.max_r_w)
      << "\nmax_R_alpha=" << g17(prof.max_r_alpha) << '\n';
  if (linear_barrier) sum << "linear_barrier=" << g17(*linear_barrier) << '\n';
  const auto stable_or_zero = [](const TwoLayerNet& n) {
    return matrix_norm(n.w, NormKind::MaxEntry) == 0.0 ? 0.0 : stable_rank(n.w);
  };
  sum << "stable_rank_start=" << g17(stable_or_zero(path.start())) << "\nstable_rank_end="
      << g17(stable_or_zero(path.end())) << '\n';
  if (o.method == "constructive") sum << "lambda=" << g17(o.lambda) << "\nradius=" << g17(spec.radius()) << '\n';
  if (!o.eval_data.empty()) {
    const Dataset eval = load_dataset(o.eval_data);
    const PathProfile ep = eval_path(path, eval, spec, o.samples, g.threads);
    write_file(dir / "profile_eval.csv", profile_to_csv(ep));
    sum << "eval_barrier=" << g17(ep.barrier) << "\neval_max_loss=" << g17(ep.max_loss) << '\n';
  }
  write_file(dir / "summary.txt", sum.str());
  out << sum.str();
}

// Minimal CSV reader for the numeric tables this tool writes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::size_t column(const std::string& name, const std::string& file) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw UsageError("report: '" + file + "' has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
  [[nodiscard]] std::vector<double> values(std::size_t col) const {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r[col]);
    return v;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

CsvTable read_csv(const std::string& file) {
  std::istringstream in(read_file(file));
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw UsageError("report: '" + file + "' is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) throw UsageError("report: ragged row in '" + file + "'");
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw UsageError("report: non-numeric cell '" + c + "' in '" + file + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void cmd_report(const ReportOpts& o, std::ostream& out) {
  const CsvTable prof = read_csv(o.profile);
  const std::size_t ct = prof.column("t", o.profile);
  const std::size_t cl = prof.column("loss", o.profile);
  const std::size_t cw = prof.column("R_W", o.profile);
  const std::size_t ca = prof.column("R_alpha", o.profile);
  const std::size_t cs = prof.column("stable_rank", o.profile);
  if (prof.rows.empty()) throw UsageError("report: '" + o.profile + "' has no samples");
  const auto t = prof.values(ct);
  const auto loss = prof.values(cl);
  std::vector<double> baseline(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) baseline[k] = (1.0 - t[k]) * loss.front() + t[k] * loss.back();

  const fs::path dir(o.out);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& svg) {
    write_file(dir / name, svg);
    written.push_back((dir / name).string());
  };
  emit("barrier.svg", render_line_chart({o.title + ": loss along the path", "t", "loss",
                                         {{"loss", t, loss, false}, {"endpoint interpolation", t, baseline, true}}}));
  emit("stable_rank.svg",
       render_line_chart({o.title + ": stable rank of W", "t", "stable rank", {{"stable rank", t, prof.values(cs), false}}}));
  emit("norms.svg", render_line_chart({o.title + ": constraint values", "t", "norm",
                                       {{"R(W)", t, prof.values(cw), false}, {"R(alpha)", t, prof.values(ca), false}}}));

  if (!o.spectra.empty()) {
    const CsvTable spec = read_csv(o.spectra);
    const std::size_t st = spec.column("t", o.spectra);
    const std::size_t ss = spec.column("sigma", o.spectra);
    std::vector<HistogramPanel> panels;
    for (double want : {0.0, 0.5, 1.0}) {
      HistogramPanel p;
      std::ostringstream title;
      title << "t = " << want;
      p.title = title.str();
      for (const auto& r : spec.rows)
        if (std::abs(r[st] - want) < 1e-12) p.values.push_back(r[ss]);
      if (!p.values.empty()) panels.push_back(std::move(p));
    }
    if (panels.empty()) throw UsageError("report: '" + o.spectra + "' has no rows at t in {0, 0.5, 1}");
    emit("spectra.svg", render_histograms(o.title + ": singular values of W", panels));
  }
  for (const auto& w : written) out << "wrote " << w << '\n';
}

void analyze_patterns(const AnalyzeOpts& o, const GlobalOpts& g, std::ostream& out) {
  const Dataset data = load_dataset(o.data);
  const PatternSet ps = enum_patterns(data, g.seed);
  std::ostringstream os;
  os << "P=" << ps.count() << "\nexact=" << (ps.exact ? "true" : "false") << '\n';
  for (const auto& p : ps.patterns) os << bits(p) << '\n';
  write_file(fs::path(o.out) / "patterns.txt", os.str());
  out << os.str();
}

void analyze_supports(const AnalyzeOpts& o, const GlobalOpts& g, std::ostream& out) {
  const Dataset data = load_dataset(o.data);
  const PatternSet ps = enum_patterns(data, g.seed);
  const MinimalSupports ms = minimal_supports(ps, data, o.lambda, o.cap);
  std::ostringstream os;
  os << "P=" << ps.count() << "\nlambda=" << g17(o.lambda) << "\ncap=" << o.cap << "\nlp_calls=" << ms.lp_calls
     << "\ntruncated=" << (ms.truncated ? "true" : "false") << "\nsupports=" << ms.supports.size() << '\n';
  for (const auto& s : ms.supports) os << "  " << s.to_string() << '\n';
  if (!ms.supports.empty()) {
    const std::size_t m_star = critical_width(ms.supports);
    os << "m_star=" << m_star << '\n';
    const SupportVector& first = ms.supports.front();
    const PtsResult lp = pts_feasible(ps, data, first, o.lambda);
    if (lp.feasible && m_star > 0) {
      const TwoLayerNet eq = equalized_from_witness(first, lp.witness, o.lambda, m_star);
      const bool ok = in_reg_set(eq, data, {NormKind::MaxEntry, o.lambda, m_star});
      os << "equalized_witness_in_reg_set=" << (ok ? "true" : "false") << '\n';
    }
  } else {
    os << "m_star=undefined (no feasible support within the cap)\n";
  }
  write_file(fs::path(o.out) / "supports.txt", os.str());
  out << os.str();
}

void analyze_regime(const AnalyzeOpts& o, const GlobalOpts& g, std::ostream& out) {
  const Dataset data = load_dataset(o.data);
  if (o.width == 0) throw UsageError("analyze regime: --width is required");
  const NormKind norm = parse_norm_kind(o.norm);
  const PatternSet ps = enum_patterns(data, g.seed);
  double lambda_fit = o.lambda_fit;
  bool estimated = false;
  if (!(lambda_fit > 0.0)) {
    lambda_fit = lambda_fit_star(data, o.width, norm, o.restarts, g.seed).lambda_fit;
    estimated = true;
  }
  const std::optional<std::size_t> m_star = o.m_star > 0 ? std::optional<std::size_t>(o.m_star) : std::nullopt;
  const std::optional<double> big_m = o.big_m > 0.0 ? std::optional<double>(o.big_m) : std::nullopt;
  const RegimeReport r = regime_check(ps, o.width, o.lambda, norm, o.m0, lambda_fit, m_star, big_m);
  std::ostringstream os;
  os << "P=" << ps.count() << "\nwidth=" << o.width << "\nnorm=" << to_string(norm) << "\nlambda=" << g17(o.lambda)
     << "\nlambda_fit=" << g17(lambda_fit) << (estimated ? " (heuristic estimate)" : " (user supplied)")
     << "\nnonempty=" << (r.nonempty ? "true" : "false")
     << "\nconnectivity=" << (r.connectivity == Guarantee::Holds ? "holds" : "unknown") << '\n';
  if (r.lambda_c) os << "lambda_c=" << g17(*r.lambda_c) << '\n';
  for (const auto& s : r.reasons) os << "reason: " << s << '\n';
  for (const auto& s : r.warnings) os << "warning: " << s << '\n';
  write_file(fs::path(o.out) / "regime.txt", os.str());
  out << os.str();
}

void analyze_finite(const AnalyzeOpts& o, const GlobalOpts& g, std::ostream& out) {
  const double L = o.L > 0.0 ? o.L : std::sqrt(static_cast<double>(o.d)) / 2.0;
  const Construction c = build_construction(o.d, L);
  const NormLadder ladder = norm_ladder(c, g.threads);
  const LambdaWindows win = lambda_windows(ladder);
  const fs::path dir(o.out);

  std::ostringstream csv;
  csv << "sigma_id,r_inf,r_op\n";
  for (const auto& row : ladder_table(c))
    csv << row.sigma_id << ',' << format_double(row.r_inf) << ',' << format_double(row.r_op) << '\n';
  write_file(dir / "ladder.csv", csv.str());

  const double dd = static_cast<double>(o.d);
  const double lambda_adamw = 1.0 / win.inv_lambda_adamw.mid();
  const double lambda_muon = 1.0 / win.inv_lambda_muon.mid();
  const Sigma h1(o.d, 1);
  Sigma h2(o.d, -1);
  h2[0] = 1;
  const TwoLayerNet p_adamw = balanced_component_point(c, h1, NormKind::MaxEntry);
  const TwoLayerNet p_muon = balanced_component_point(c, h2, NormKind::Operator);
  const bool in_adamw = in_reg_set(p_adamw, c.data, {NormKind::MaxEntry, lambda_adamw, 2});
  const bool in_muon = in_reg_set(p_muon, c.data, {NormKind::Operator, lambda_muon, 2});
  const BarrierWitness bw = barrier_witness(c, linear_path(p_adamw, p_muon));

  std::ostringstream os;
  os << "d=" << o.d << "\nL=" << g17(L) << '\n';
  os << "r_inf_1=" << g17(ladder.r_inf_1) << "\nr_inf_2=" << g17(ladder.r_inf_2)
     << "\nr_inf_2_closed_form_sqrt_d_over_2=" << g17(predicted_r_inf_2(o.d))
     << "\nr_inf_2_closed_form_general_L=" << g17(predicted_r_inf_2_general(o.d, L)) << '\n';
  os << "r_op_1=" << g17(ladder.r_op_1) << "\nr_op_1_closed_form_sqrt_2L=" << g17(std::sqrt(2.0 * L))
     << "\nr_op_1_closed_form_d_quarter_over_sqrt2=" << g17(std::pow(dd, 0.25) / std::sqrt(2.0))
     << "\nr_op_2=" << g17(ladder.r_op_2) << "\nr_op_2_closed_form=" << g17(predicted_r_op_2(o.d, L)) << '\n';
  os << "argmin_inf=";
  for (const auto& s : ladder.argmin_inf) os << sigma_str(s) << ' ';
  os << "\nargmin_op=";
  for (const auto& s : ladder.argmin_op) os << sigma_str(s) << ' ';
  os << "\ninv_lambda_adamw=[" << g17(win.inv_lambda_adamw.lo) << ", " << g17(win.inv_lambda_adamw.hi) << ")"
     << "\ninv_lambda_muon=[" << g17(win.inv_lambda_muon.lo) << ", " << g17(win.inv_lambda_muon.hi) << ")"
     << "\nlambda_adamw_midpoint=" << g17(lambda_adamw) << "\nlambda_muon_midpoint=" << g17(lambda_muon)
     << "\nadamw_point_in_reg_set=" << (in_adamw ? "true" : "false")
     << "\nmuon_point_in_reg_set=" << (in_muon ? "true" : "false") << "\nbarrier_t_star=" << g17(bw.t_star)
     << "\nbarrier_coordinate=" << bw.coordinate << "\nbarrier_loss=" << g17(bw.loss) << '\n';
  write_file(dir / "finite_report.txt", os.str());
  out << os.str();
}

void analyze_overlap(const AnalyzeOpts& o, const GlobalOpts& g, std::ostream& out) {
  const Dataset data = load_dataset(o.data);
  if (o.width == 0) throw UsageError("analyze overlap: --width is required");
  const NormKind n1 = parse_norm_kind(o.norm1);
  const NormKind n2 = parse_norm_kind(o.norm2);
  std::ostringstream os;
  const OverlapVerdict v = inter_overlap(data, o.width, n1, o.lambda1, n2, o.lambda2, o.restarts, g.seed);
  os << "norm1=" << to_string(n1) << "\nlambda1=" << g17(o.lambda1) << "\nnorm2=" << to_string(n2)
     << "\nlambda2=" << g17(o.lambda2) << "\nverdict=" << (v.overlap_found ? "overlap_found" : "none_found")
     << "\ncertified=" << (v.certified ? "true" : "false (heuristic)") << '\n';
  if (v.witness) save_checkpoint(fs::path(o.out) / "overlap_witness.json", Checkpoint{*v.witness, {}});
  if (o.lo > 0.0 && o.lo < o.hi) {
    const Lambda2Estimate est = lambda2_star(data, o.width, n1, o.lambda1, n2, o.lo, o.hi, o.iters, o.restarts, g.seed);
    os << "lambda2_star=" << g17(est.value) << " (heuristic)\nunbracketed=" << (est.unbracketed ? "true" : "false")
       << '\n';
    for (const auto& [l2, found] : est.trace) os << "  probe lambda2=" << g17(l2) << " overlap=" << found << '\n';
  }
  write_file(fs::path(o.out) / "overlap.txt", os.str());
  out << os.str();
}

void cmd_analyze(const AnalyzeOpts& o, const GlobalOpts& g, std::ostream& out) {
  const bool needs_data = o.mode != "finite";
  if (needs_data && o.data.empty()) throw UsageError("analyze " + o.mode + ": --data is required");
  if (o.mode == "patterns") analyze_patterns(o, g, out);
  else if (o.mode == "supports") analyze_supports(o, g, out);
  else if (o.mode == "regime") analyze_regime(o, g, out);
  else if (o.mode == "finite") analyze_finite(o, g, out);
  else if (o.mode == "overlap") analyze_overlap(o, g, out);
  else throw UsageError("analyze: mode must be patterns, supports, regime, finite or overlap");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimizer-induced mode connectivity laboratory for two-layer ReLU networks", "connectikit"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Read flags from a key=value file (one [section] per subcommand)");
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Root seed for every named random substream");
  app.add_option("--threads", g.threads, "Worker cap for parallel evaluations (0 = all cores)");

  GenDataOpts gd;
  CLI::App* sub_gen = app.add_subcommand("gen-data", "Generate a teacher, toy or finite-construction dataset");
  sub_gen->configurable()->fallthrough();
  sub_gen->add_option("--mode", gd.mode, "teacher | finite | toy");
  sub_gen->add_option("--n", gd.n, "Number of samples (teacher mode)");
  sub_gen->add_option("--d", gd.d, "Input dimension (required for teacher and finite modes)");
  sub_gen->add_option("--teacher-width", gd.teacher_width, "Teacher width (teacher mode)");
  sub_gen->add_option("--L", gd.L, "Construction parameter, 1 < L < sqrt(d); 0 selects sqrt(d)/2");
  sub_gen->add_option("--out", gd.out, "Output directory");

  TrainOpts tr;
  CLI::App* sub_train = app.add_subcommand("train", "Full-batch training with AdamW or a Lion-K optimizer");
  sub_train->configurable()->fallthrough();
  sub_train->add_option("--data", tr.data, "Dataset file")->required();
  sub_train->add_option("--optimizer", tr.optimizer, "adamw | signum | normmom | muon");
  sub_train->add_option("--width", tr.width, "Hidden width m");
  sub_train->add_option("--eta", tr.eta, "Step size");
  sub_train->add_option("--lambda", tr.lambda, "Decoupled weight decay");
  sub_train->add_option("--mu", tr.mu, "Lion-K momentum");
  sub_train->add_option("--beta1", tr.beta1, "AdamW first-moment decay");
  sub_train->add_option("--beta2", tr.beta2, "AdamW second-moment decay");
  sub_train->add_option("--eps", tr.eps, "AdamW stabilizer");
  sub_train->add_option("--steps", tr.steps, "Step budget");
  sub_train->add_option("--init-scale", tr.init_scale, "Gaussian initialization scale");
  sub_train->add_flag("--newton-schulz", tr.newton_schulz, "Muon: approximate polar factor by Newton-Schulz");
  sub_train->add_option("--out", tr.out, "Output directory");

  ConnectOpts co;
  CLI::App* sub_conn = app.add_subcommand("connect", "Build and profile a path between two checkpoints");
  sub_conn->configurable()->fallthrough();
  sub_conn->add_option("--a", co.a, "First endpoint checkpoint")->required();
  sub_conn->add_option("--b", co.b, "Second endpoint checkpoint")->required();
  sub_conn->add_option("--data", co.data, "Dataset the path is built and profiled on")->required();
  sub_conn->add_option("--eval-data", co.eval_data, "Optional second dataset to profile the same path on");
  sub_conn->add_option("--method", co.method, "linear | polychain | constructive");
  sub_conn->add_option("--align", co.align, "none | weights | activations");
  sub_conn->add_option("--norm", co.norm, "Constraint norm: maxentry | frobenius | operator");
  sub_conn->add_option("--lambda", co.lambda, "Weight decay defining the regularized set (constructive)");
  sub_conn->add_option("--samples", co.samples, "Profile sample count");
  sub_conn->add_option("--iterations", co.iterations, "Polychain bend iterations");
  sub_conn->add_option("--lr", co.lr, "Polychain bend step size");
  sub_conn->add_option("--t-lo", co.t_lo, "Polychain sampling interval start");
  sub_conn->add_option("--t-hi", co.t_hi, "Polychain sampling interval end");
  sub_conn->add_option("--cap", co.cap, "Support search cap (constructive, max-entry norm)");
  sub_conn->add_option("--tol", co.tol, "Membership tolerance for the regularized set (constructive)");
  sub_conn->add_option("--out", co.out, "Output directory");

  ReportOpts rp;
  CLI::App* sub_rep = app.add_subcommand("report", "Render SVG charts from profile and spectra CSVs");
  sub_rep->configurable()->fallthrough();
  sub_rep->add_option("--profile", rp.profile, "Profile CSV (t,loss,R_W,R_alpha,stable_rank)")->required();
  sub_rep->add_option("--spectra", rp.spectra, "Spectra CSV (t,index,sigma)");
  sub_rep->add_option("--title", rp.title, "Chart title prefix");
  sub_rep->add_option("--out", rp.out, "Output directory");

  AnalyzeOpts an;
  CLI::App* sub_an = app.add_subcommand("analyze", "Arrangement, support, regime, finite-construction and overlap analyses");
  sub_an->configurable()->fallthrough();
  sub_an->add_option("mode", an.mode, "patterns | supports | regime | finite | overlap")->required();
  sub_an->add_option("--data", an.data, "Dataset file");
  sub_an->add_option("--lambda", an.lambda, "Weight decay");
  sub_an->add_option("--norm", an.norm, "Constraint norm (regime)");
  sub_an->add_option("--cap", an.cap, "Per-coordinate support cap (supports)");
  sub_an->add_option("--width", an.width, "Hidden width m (regime, overlap)");
  sub_an->add_option("--m0", an.m0, "Minimal interpolating width (regime)");
  sub_an->add_option("--lambda-fit", an.lambda_fit, "Known critical fitting lambda; 0 estimates it (regime)");
  sub_an->add_option("--m-star", an.m_star, "Critical width from the support analysis; 0 if unknown (regime)");
  sub_an->add_option("--M", an.big_m, "Polyhedral constant for the max-entry regime; 0 if unknown (regime)");
  sub_an->add_option("--restarts", an.restarts, "Multi-start count for heuristic searches");
  sub_an->add_option("--d", an.d, "Construction dimension (finite)");
  sub_an->add_option("--L", an.L, "Construction parameter; 0 selects sqrt(d)/2 (finite)");
  sub_an->add_option("--norm1", an.norm1, "First constraint norm (overlap)");
  sub_an->add_option("--lambda1", an.lambda1, "First weight decay (overlap)");
  sub_an->add_option("--norm2", an.norm2, "Second constraint norm (overlap)");
  sub_an->add_option("--lambda2", an.lambda2, "Second weight decay (overlap)");
  sub_an->add_option("--lo", an.lo, "Lower bracket for the lambda2 bisection (overlap)");
  sub_an->add_option("--hi", an.hi, "Upper bracket for the lambda2 bisection (overlap)");
  sub_an->add_option("--iters", an.iters, "Bisection steps (overlap)");
  sub_an->add_option("--out", an.out, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sub_gen->parsed()) {
      cmd_gen_data(gd, g, out);
      write_manifest(gd.out, g, *sub_gen);
    } else if (sub_train->parsed()) {
      cmd_train(tr, g, out);
      write_manifest(tr.out, g, *sub_train);
    } else if (sub_conn->parsed()) {
      cmd_connect(co, g, out);
      write_manifest(co.out, g, *sub_conn);
    } else if (sub_rep->parsed()) {
      cmd_report(rp, out);
      write_manifest(rp.out, g, *sub_rep);
    } else if (sub_an->parsed()) {
      cmd_analyze(an, g, out);
      write_manifest(an.out, g, *sub_an);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Usage: return kExitUsage;
      case ErrorKind::Numeric: return kExitNumeric;
      case ErrorKind::Precondition: return kExitPrecondition;
    }
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace connectikit::cli
