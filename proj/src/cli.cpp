#include "qpm/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "qpm/krylov.hpp"
#include "qpm/moments.hpp"

namespace qpm {

namespace {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // NaN renders as an empty CSV cell
  std::vector<std::pair<std::string, std::string>> meta;

  void add_meta(const std::string& k, const std::string& v) { meta.emplace_back(k, v); }
};

std::string fmt_num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string timestamp_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_table(const Table& t, const std::string& format, std::ostream& os,
                 const std::string& command, std::uint64_t seed) {
  if (format == "csv") {
    os << "# qpm " << kVersion << "\n";
    os << "# command: " << command << "\n";
    os << "# seed: " << seed << "\n";
    os << "# timestamp: " << timestamp_now() << "\n";
    for (const auto& [k, v] : t.meta) os << "# " << k << ": " << v << "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      os << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        os << fmt_num(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
    return;
  }
  nlohmann::json j;
  j["meta"]["version"] = kVersion;
  j["meta"]["command"] = command;
  j["meta"]["seed"] = seed;
  j["meta"]["timestamp"] = timestamp_now();
  for (const auto& [k, v] : t.meta) j["meta"][k] = v;
  j["columns"] = t.columns;
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json jr = nlohmann::json::array();
    for (double v : row) {
      if (std::isnan(v))
        jr.push_back(nullptr);
      else
        jr.push_back(v);
    }
    rows.push_back(std::move(jr));
  }
  os << j.dump(2) << "\n";
}

void emit(const Table& t, const std::string& out_path, const std::string& format,
          std::ostream& fallback, const std::string& command, std::uint64_t seed) {
  if (out_path.empty()) {
    write_table(t, format, fallback, command, seed);
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open output file " + out_path);
  write_table(t, format, f, command, seed);
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw CLI::ValidationError("empty numeric list");
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_double_list(s)) out.push_back(int(std::lround(v)));
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct ModelArgs {
  std::string model = "heisenberg";
  int n_qubits = 16;
  double J = 1.0;
  double U_H = 4.0;
  std::string custom_json;
};

PartitionedHamiltonian build_model(const ModelArgs& m) {
  if (m.model == "heisenberg") return heisenberg_ring(m.n_qubits, m.J);
  if (m.model == "hubbard") return hubbard_ladder_4x2(m.J, m.U_H);
  if (m.model == "custom") {
    std::ifstream f(m.custom_json);
    if (!f) throw std::runtime_error("cannot open custom model file " + m.custom_json);
    std::stringstream ss;
    ss << f.rdbuf();
    return hamiltonian_from_json(ss.str());
  }
  throw CLI::ValidationError("unknown model " + m.model);
}

State resolve_reference(const std::string& label, const ModelArgs& m,
                        const PartitionedHamiltonian& H, std::ostream& err) {
  if (label.size() > 5 && label.substr(label.size() - 5) == ".qpsv") {
    double in_norm = 1.0;
    State s = load_state(label, &in_norm);
    if (std::abs(in_norm - 1.0) > 1e-6)
      err << "warning: " << label << " had norm " << in_norm << "; renormalized\n";
    if (s.n_qubits != H.n_qubits())
      throw std::runtime_error("reference state " + label + " has wrong qubit count");
    return s;
  }
  if (m.model == "heisenberg") return heisenberg_reference(m.n_qubits, label);
  if (m.model == "hubbard") {
    if (label == "u0") return hubbard_u0_ground_state(m.J);
    return hubbard_reference(label);
  }
  throw std::runtime_error("custom models require .qpsv reference files");
}

void add_model_flags(CLI::App* cmd, ModelArgs& m, bool with_n = true) {
  cmd->add_option("--model", m.model, "heisenberg|hubbard|custom")
      ->check(CLI::IsMember({"heisenberg", "hubbard", "custom"}));
  if (with_n) cmd->add_option("--n,--n-qubits", m.n_qubits, "qubit count (heisenberg)");
  cmd->add_option("--j", m.J, "exchange/hopping J");
  cmd->add_option("--uh", m.U_H, "Hubbard interaction U_H");
  cmd->add_option("--custom-file", m.custom_json, "custom model JSON file");
}

double model_energy_scale(const ModelArgs& m) {
  // energies are reported per NJ (heisenberg) or per (N/2) J (hubbard)
  if (m.model == "hubbard") return 16.0 * m.J / 2.0;
  return double(m.n_qubits) * m.J;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"quantum power method experiments"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_path;
  std::string format = "csv";
  app.add_option("--seed", seed, "global RNG seed")->capture_default_str();
  app.add_option("--threads", threads, "advisory; results are identical regardless");
  app.add_option("--out", out_path, "output file (stdout when omitted)");
  app.add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  // coeffs
  auto* c_coeffs = app.add_subcommand("coeffs", "Suzuki-Trotter coefficients s_i");
  int co_m = 2, co_p = 5, co_ng = 2;
  c_coeffs->add_option("--m", co_m, "half order m");
  c_coeffs->add_option("--p", co_p, "recursion fan-out p (odd >= 3)");
  c_coeffs->add_option("--ngamma", co_ng, "number of Hamiltonian parts");

  // groundstate
  auto* c_gs = app.add_subcommand("groundstate", "exact ground state via Lanczos");
  ModelArgs gs_model;
  double gs_tol = 1e-10;
  std::string gs_save;
  add_model_flags(c_gs, gs_model);
  c_gs->add_option("--tol", gs_tol, "residual tolerance");
  c_gs->add_option("--save", gs_save, "write the ground state to a QPSV file");

  // distance
  auto* c_dist = app.add_subcommand("distance", "operator distance d(H^n, H^n_ST(r))");
  ModelArgs di_model;
  di_model.n_qubits = 10;
  std::string di_powers = "1", di_dtaus = "0.05";
  int di_r = 0, di_m = 1, di_p = 3, di_samples = -1;
  add_model_flags(c_dist, di_model);
  c_dist->add_option("--power", di_powers, "comma list of powers n");
  c_dist->add_option("--dtau-list", di_dtaus, "comma list of dtau J values");
  c_dist->add_option("--r", di_r, "Richardson order");
  c_dist->add_option("--m", di_m, "Suzuki-Trotter half order");
  c_dist->add_option("--p", di_p, "Suzuki-Trotter fan-out");
  c_dist->add_option("--samples", di_samples, "random-phase samples R (default 256 N<=10, 16 above)");

  // krylov
  auto* c_kry = app.add_subcommand("krylov", "block Krylov subspace diagonalization");
  ModelArgs kr_model;
  std::string kr_refs = "phiA", kr_scheme = "variational";
  int kr_mb = -1, kr_nmax = 8, kr_r = 1, kr_m = 1, kr_p = 3;
  double kr_dtau = 0.05, kr_scut = 1e-12;
  add_model_flags(c_kry, kr_model);
  c_kry->add_option("--refs", kr_refs, "reference labels or .qpsv paths (comma list)");
  c_kry->add_option("--mb", kr_mb, "block size (validated against --refs)");
  c_kry->add_option("--nmax", kr_nmax, "max subspace dimension per block");
  c_kry->add_option("--dtau", kr_dtau, "time interval dtau J");
  c_kry->add_option("--r", kr_r, "Richardson order");
  c_kry->add_option("--m", kr_m, "Suzuki-Trotter half order");
  c_kry->add_option("--p", kr_p, "Suzuki-Trotter fan-out");
  c_kry->add_option("--scheme", kr_scheme, "variational|direct")
      ->check(CLI::IsMember({"variational", "direct"}));
  c_kry->add_option("--scut", kr_scut, "relative singular-value cutoff");

  // compare
  auto* c_cmp = app.add_subcommand("compare", "ITE/RTE/QPM Krylov comparison");
  ModelArgs cm_model;
  std::string cm_kind = "qpm", cm_dtaus = "0.1", cm_ref = "phiA";
  int cm_nmax = 20, cm_r = 0, cm_m = 1, cm_p = 3;
  add_model_flags(c_cmp, cm_model);
  c_cmp->add_option("--kind", cm_kind, "ite|rte|qpm")
      ->check(CLI::IsMember({"ite", "rte", "qpm"}));
  c_cmp->add_option("--dtau-list", cm_dtaus, "comma list of dtau J values");
  c_cmp->add_option("--ref", cm_ref, "reference label or .qpsv path");
  c_cmp->add_option("--nmax", cm_nmax, "max subspace dimension");
  c_cmp->add_option("--r", cm_r, "Richardson order (qpm only)");
  c_cmp->add_option("--m", cm_m, "Suzuki-Trotter half order");
  c_cmp->add_option("--p", cm_p, "Suzuki-Trotter fan-out");

  // moments
  auto* c_mom = app.add_subcommand("moments", "Hamiltonian moments, cumulants, Lanczos");
  ModelArgs mo_model;
  mo_model.n_qubits = 10;
  std::string mo_ref = "phiA", mo_prov = "fd";
  int mo_nmax = 6, mo_r = 0, mo_m = 1, mo_p = 3;
  double mo_dtau = 0.0;
  add_model_flags(c_mom, mo_model);
  c_mom->add_option("--ref", mo_ref, "reference label or .qpsv path");
  c_mom->add_option("--nmax", mo_nmax, "highest moment order");
  c_mom->add_option("--dtau", mo_dtau, "time interval (required for fd provenance)");
  c_mom->add_option("--r", mo_r, "Richardson order");
  c_mom->add_option("--m", mo_m, "Suzuki-Trotter half order");
  c_mom->add_option("--p", mo_p, "Suzuki-Trotter fan-out");
  c_mom->add_option("--provenance", mo_prov, "fd|exact")
      ->check(CLI::IsMember({"fd", "exact"}));

  // cmx
  auto* c_cmx = app.add_subcommand("cmx", "connected-moment expansion of E(tau)");
  ModelArgs cx_model;
  cx_model.n_qubits = 10;
  std::string cx_ref = "phiA", cx_prov = "fd";
  int cx_nmax = 4, cx_r = 0, cx_m = 1, cx_p = 3, cx_steps = 60;
  double cx_dtau = 0.0, cx_tau_max = 3.0;
  add_model_flags(c_cmx, cx_model);
  c_cmx->add_option("--ref", cx_ref, "reference label or .qpsv path");
  c_cmx->add_option("--nmax", cx_nmax, "CMX truncation order");
  c_cmx->add_option("--dtau", cx_dtau, "time interval (required for fd provenance)");
  c_cmx->add_option("--r", cx_r, "Richardson order");
  c_cmx->add_option("--m", cx_m, "Suzuki-Trotter half order");
  c_cmx->add_option("--p", cx_p, "Suzuki-Trotter fan-out");
  c_cmx->add_option("--tau-max", cx_tau_max, "imaginary-time grid end");
  c_cmx->add_option("--tau-steps", cx_steps, "grid points");
  c_cmx->add_option("--provenance", cx_prov, "fd|exact")
      ->check(CLI::IsMember({"fd", "exact"}));

  // propagator
  auto* c_prop = app.add_subcommand("propagator", "K(t) overlap series");
  ModelArgs pr_model;
  pr_model.n_qubits = 10;
  std::string pr_ref = "phiA";
  int pr_steps = 50, pr_m = 1, pr_p = 3;
  double pr_dtau = 0.1;
  add_model_flags(c_prop, pr_model);
  c_prop->add_option("--ref", pr_ref, "reference label, .qpsv path, or 'groundstate'");
  c_prop->add_option("--dtau", pr_dtau, "time interval");
  c_prop->add_option("--steps", pr_steps, "ladder length L");
  c_prop->add_option("--m", pr_m, "Suzuki-Trotter half order");
  c_prop->add_option("--p", pr_p, "Suzuki-Trotter fan-out");

  // translate
  auto* c_tr = app.add_subcommand("translate", "cyclic qubit-label shift of a QPSV state");
  std::string tr_in, tr_out;
  int tr_shift = 1;
  c_tr->add_option("--in", tr_in, "input QPSV file")->required();
  c_tr->add_option("--shift", tr_shift, "lattice translation k");
  c_tr->add_option("--out-file", tr_out, "output QPSV file")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help
      out << app.help() << std::endl;
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  std::string command = "qpm";
  for (const auto& a : args) command += " " + a;

  try {
    if (*c_coeffs) {
      const auto sch = suzuki_coefficients(co_m, co_p, co_ng);
      Table t;
      t.columns = {"i", "s_i", "T_i"};
      double cum = 0.0, sum = 0.0;
      for (double v : sch.s) sum += v;
      for (int i = 0; i < sch.depth(); ++i) {
        cum += sch.s[i];
        t.rows.push_back({double(i + 1), sch.s[i], cum});
      }
      t.add_meta("order", std::to_string(2 * co_m));
      t.add_meta("depth", std::to_string(sch.depth()));
      t.add_meta("sum_s", fmt_num(sum));
      emit(t, out_path, format, out, command, seed);
      return 0;
    }

    if (*c_gs) {
      const auto H = build_model(gs_model);
      const auto res = exact_ground_state(H, gs_tol, seed);
      if (!gs_save.empty()) save_state(res.psi, gs_save);
      const double scale = model_energy_scale(gs_model);
      Table t;
      t.columns = {"E0", "E0_scaled"};
      t.rows.push_back({res.energy, res.energy / scale});
      t.add_meta("iterations", std::to_string(res.iterations));
      t.add_meta("scale", gs_model.model == "hubbard" ? "NJ/2" : "NJ");
      out << "E0 = " << fmt_num(res.energy) << "\n";
      out << (gs_model.model == "hubbard" ? "E0/(NJ/2) = " : "E0/NJ = ")
          << fmt_num(res.energy / scale) << "\n";
      emit(t, out_path, format, out, command, seed);
      return 0;
    }

    if (*c_dist) {
      const auto H = build_model(di_model);
      const auto scheme = suzuki_coefficients(di_m, di_p, H.n_parts());
      if (di_samples <= 0) di_samples = H.n_qubits() <= 10 ? 256 : 16;
      const auto rows = distance_order_scan(H, parse_int_list(di_powers),
                                            parse_double_list(di_dtaus), scheme, di_r, 2.0,
                                            di_samples, seed);
      Table t;
      t.columns = {"n", "dtau", "d", "stderr"};
      std::string flagged;
      for (const auto& r : rows) {
        t.rows.push_back({double(r.n), r.dtau, r.d, r.stderr_d});
        if (r.cancellation_flag)
          flagged += "(" + std::to_string(r.n) + "," + fmt_num(r.dtau) + ") ";
      }
      t.add_meta("samples", std::to_string(di_samples));
      t.add_meta("cancellation_flagged", flagged.empty() ? "none" : flagged);
      emit(t, out_path, format, out, command, seed);
      return 0;
    }

    if (*c_kry) {
      const auto H = build_model(kr_model);
      ReferenceSet refs;
      for (const auto& lbl : split_list(kr_refs)) {
        refs.states.push_back(resolve_reference(lbl, kr_model, H, err));
        refs.labels.push_back(lbl);
      }
      if (kr_mb > 0 && kr_mb != refs.block_size())
        throw CLI::ValidationError("--mb does not match the number of --refs");
      KrylovOptions opt;
      opt.n_max = kr_nmax;
      opt.scheme = kr_scheme == "direct" ? MatrixScheme::Direct : MatrixScheme::Variational;
      opt.s_cut = kr_scut;
      opt.power.dtau = kr_dtau;
      opt.power.r = kr_r;
      opt.power.scheme = suzuki_coefficients(kr_m, kr_p, H.n_parts());
      const auto gs = exact_ground_state(H, 1e-10, seed);
      const auto res = krylov_run(H, refs, opt, &gs.psi);
      Table t;
      t.columns = {"n", "E_KS", "E_KS_minus_E0", "fidelity", "cond_S", "kept_dim"};
      for (const auto& pt : res.trace)
        t.rows.push_back({double(pt.n), pt.e_ks, pt.e_ks - gs.energy, pt.fidelity, pt.cond_s,
                          double(pt.kept_dim)});
      t.add_meta("E0", fmt_num(gs.energy));
      t.add_meta("cancellation_flagged", res.cancellation.flagged ? "yes" : "no");
      emit(t, out_path, format, out, command, seed);
      return 0;
    }

    if (*c_cmp) {
      const auto H = build_model(cm_model);
      const auto scheme = suzuki_coefficients(cm_m, cm_p, H.n_parts());
      const State ref = resolve_reference(cm_ref, cm_model, H, err);
      const auto gs = exact_ground_state(H, 1e-10, seed);
      const ComparisonKind kind = cm_kind == "ite"   ? ComparisonKind::ITE
                                  : cm_kind == "rte" ? ComparisonKind::RTE
                                                     : ComparisonKind::QPM;
      Table t;
      t.columns = {"dtau", "n", "E_KS", "err_rel", "cond_S"};
      for (double dtau : parse_double_list(cm_dtaus)) {
        for (const auto& pt : comparison_subspaces(H, ref, cm_nmax, dtau, kind, scheme, cm_r))
          t.rows.push_back({dtau, double(pt.n), pt.e_ks,
                            std::abs((pt.e_ks - gs.energy) / gs.energy), pt.cond_s});
      }
      t.add_meta("kind", cm_kind);
      t.add_meta("E0", fmt_num(gs.energy));
      emit(t, out_path, format, out, command, seed);
      return 0;
    }

    if (*c_mom || *c_cmx) {
      const bool is_cmx = bool(*c_cmx);
      const ModelArgs& mm = is_cmx ? cx_model : mo_model;
      const std::string ref_lbl = is_cmx ? cx_ref : mo_ref;
      const std::string prov = is_cmx ? cx_prov : mo_prov;
      const int nmax = is_cmx ? std::max(cx_nmax, 2) : mo_nmax;
      const int r = is_cmx ? cx_r : mo_r;
      const double dtau = is_cmx ? cx_dtau : mo_dtau;
      const auto H = build_model(mm);
      const State ref = resolve_reference(ref_lbl, mm, H, err);
      std::vector<double> mu;
      if (prov == "exact") {
        mu = exact_sparse_moments(H, ref, is_cmx ? nmax : 2 * nmax + 1);
      } else {
        if (dtau <= 0.0)
          throw CLI::ValidationError("--dtau is required for fd provenance");
        const auto scheme = suzuki_coefficients(is_cmx ? cx_m : mo_m, is_cmx ? cx_p : mo_p,
                                                H.n_parts());
        const int want = is_cmx ? nmax : 2 * nmax + 1;
        std::vector<PropagatorSeries> series;
        for (int l = 0; l <= r; ++l)
          series.push_back(propagator_series(H, scheme, dtau / std::pow(2.0, l), want, ref));
        mu.resize(want + 1);
        mu[0] = 1.0;
        for (int n = 1; n <= want; ++n) mu[n] = moments_from_propagator(series, n, r);
      }
      const auto kappa = cumulants_from_moments(mu);

      if (is_cmx) {
        std::vector<double> tau_grid;
        for (int i = 0; i <= cx_steps; ++i) tau_grid.push_back(cx_tau_max * i / cx_steps);
        const auto e_cmx = cmx_energy(kappa, nmax, tau_grid);
        const auto e_exact = exact_ite_energy(H, ref, tau_grid);
        Table t;
        t.columns = {"tau", "E_cmx", "E_exact"};
        for (std::size_t i = 0; i < tau_grid.size(); ++i)
          t.rows.push_back({tau_grid[i], e_cmx[i], e_exact[i]});
        t.add_meta("n_max", std::to_string(nmax));
        t.add_meta("r", std::to_string(r));
        t.add_meta("provenance", prov);
        emit(t, out_path, format, out, command, seed);
        return 0;
      }

      LanczosCoefficients lan;
      std::string lan_note = "ok";
      try {
        lan = lanczos_from_moments(mu);
      } catch (const NumericalBreakdown& e) {
        lan_note = e.what();
      }
      Table t;
      t.columns = {"index", "mu", "kappa", "alpha", "beta"};
      const double nan = std::nan("");
      for (std::size_t i = 0; i < mu.size(); ++i) {
        const double a = (i >= 1 && i <= lan.alpha.size()) ? lan.alpha[i - 1] : nan;
        const double b = (i >= 1 && i <= lan.beta.size()) ? lan.beta[i - 1] : nan;
        t.rows.push_back({double(i), mu[i], kappa[i], a, b});
      }
      t.add_meta("r", std::to_string(r));
      t.add_meta("provenance", prov);
      t.add_meta("lanczos", lan_note);
      emit(t, out_path, format, out, command, seed);
      return 0;
    }

    if (*c_prop) {
      const auto H = build_model(pr_model);
      const auto scheme = suzuki_coefficients(pr_m, pr_p, H.n_parts());
      State ref(1);
      if (pr_ref == "groundstate") {
        ref = exact_ground_state(H, 1e-10, seed).psi;
      } else {
        ref = resolve_reference(pr_ref, pr_model, H, err);
      }
      const auto series = propagator_series(H, scheme, pr_dtau, pr_steps, ref);
      Table t;
      t.columns = {"l", "t", "re_K", "im_K", "abs_K", "arg_K_unwrapped"};
      for (std::size_t l = 0; l < series.values.size(); ++l) {
        const cplx K = series.values[l];
        t.rows.push_back({double(l), 0.5 * pr_dtau * double(l), K.real(), K.imag(),
                          std::abs(K), series.phase[l]});
      }
      t.add_meta("unwrap_ambiguous", series.unwrap_ambiguous ? "yes" : "no");
      emit(t, out_path, format, out, command, seed);
      return 0;
    }

    if (*c_tr) {
      double in_norm = 1.0;
      State s = load_state(tr_in, &in_norm);
      if (std::abs(in_norm - 1.0) > 1e-6)
        err << "warning: " << tr_in << " had norm " << in_norm << "; renormalized\n";
      save_state(translate_state(s, tr_shift), tr_out);
      out << "wrote " << tr_out << "\n";
      return 0;
    }
  } catch (const NumericalBreakdown& e) {
    err << "numerical breakdown: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace qpm
