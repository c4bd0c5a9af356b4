#include <optional>
#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpm/cli.hpp"
#include "qpm/krylov.hpp"
#include "qpm/moments.hpp"

namespace py = pybind11;
using namespace qpm;

namespace {

py::array_t<cplx> to_numpy(const State& s) {
  py::array_t<cplx> arr(s.dim());
  std::copy(s.amps.begin(), s.amps.end(), arr.mutable_data());
  return arr;
}

State from_numpy(const py::array_t<cplx, py::array::c_style | py::array::forcecast>& arr) {
  const auto n = arr.size();
  if (n < 2 || (n & (n - 1)) != 0)
    throw std::invalid_argument("amplitude array length must be a power of two");
  int nq = 0;
  while ((py::ssize_t(1) << nq) < n) ++nq;
  State s(nq);
  std::copy(arr.data(), arr.data() + n, s.amps.begin());
  return s;
}

PowerConfig make_config(int n, double dtau, int r, int m, int p, int n_gamma,
                        const std::string& formalism) {
  PowerConfig cfg;
  cfg.n = n;
  cfg.dtau = dtau;
  cfg.r = r;
  cfg.scheme = suzuki_coefficients(m, p, n_gamma);
  cfg.formalism = formalism == "alternative" ? Formalism::AlternativeForm
                                             : Formalism::ProductForm;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_qpm, mod) {
  mod.doc() = "statevector simulator for Hamiltonian powers from Trotterized evolutions";
  mod.attr("__version__") = kVersion;

  py::class_<PartitionedHamiltonian>(mod, "Hamiltonian")
      .def_property_readonly("n_qubits", &PartitionedHamiltonian::n_qubits)
      .def_property_readonly("n_parts", &PartitionedHamiltonian::n_parts)
      .def("to_json", &hamiltonian_to_json);

  mod.def("heisenberg_ring", &heisenberg_ring, py::arg("n_qubits"), py::arg("j") = 1.0);
  mod.def("hubbard_ladder_4x2", &hubbard_ladder_4x2, py::arg("j") = 1.0,
          py::arg("u_h") = 4.0);
  mod.def("hamiltonian_from_json", &hamiltonian_from_json, py::arg("json_text"));

  mod.def("zero_state", [](int nq) { return to_numpy(zero_state(nq)); }, py::arg("n_qubits"));
  mod.def("random_phase_state",
          [](int nq, std::uint64_t seed) { return to_numpy(random_phase_state(nq, seed)); },
          py::arg("n_qubits"), py::arg("seed"));
  mod.def("apply_hamiltonian",
          [](const PartitionedHamiltonian& H, const py::array_t<cplx>& psi) {
            return to_numpy(apply_hamiltonian(H, from_numpy(psi)));
          });
  mod.def("expectation",
          [](const PartitionedHamiltonian& H, const py::array_t<cplx>& psi) {
            return expectation(H, from_numpy(psi));
          });
  mod.def("exact_ground_state",
          [](const PartitionedHamiltonian& H, double tol, std::uint64_t seed) {
            const auto res = exact_ground_state(H, tol, seed);
            return py::make_tuple(res.energy, to_numpy(res.psi));
          },
          py::arg("hamiltonian"), py::arg("tol") = 1e-10, py::arg("seed") = 7);

  mod.def("suzuki_coefficients", [](int m, int p, int n_gamma) {
    const auto sch = suzuki_coefficients(m, p, n_gamma);
    py::dict d;
    d["s"] = sch.s;
    d["part_index"] = sch.part_index;
    d["depth"] = sch.depth();
    return d;
  });
  mod.def("trotter_depth", &trotter_depth);
  mod.def("apply_trotter",
          [](const PartitionedHamiltonian& H, const py::array_t<cplx>& psi, double dtau,
             int m, int p) {
            const auto sch = suzuki_coefficients(m, p, H.n_parts());
            return to_numpy(apply_trotter(sch, H, dtau, from_numpy(psi)));
          },
          py::arg("hamiltonian"), py::arg("psi"), py::arg("dtau"), py::arg("m") = 1,
          py::arg("p") = 3);

  mod.def("apply_power",
          [](const PartitionedHamiltonian& H, const py::array_t<cplx>& psi, int n,
             double dtau, int r, int m, int p, const std::string& formalism) {
            const auto cfg = make_config(n, dtau, r, m, p, H.n_parts(), formalism);
            CancellationInfo info;
            auto out = to_numpy(apply_power(cfg, H, from_numpy(psi), &info));
            return py::make_tuple(out, info.digits_lost, info.flagged);
          },
          py::arg("hamiltonian"), py::arg("psi"), py::arg("n"), py::arg("dtau"),
          py::arg("r") = 0, py::arg("m") = 1, py::arg("p") = 3,
          py::arg("formalism") = "product");

  mod.def("heisenberg_reference", [](int nq, const std::string& label) {
    return to_numpy(heisenberg_reference(nq, label));
  });
  mod.def("hubbard_reference",
          [](const std::string& label) { return to_numpy(hubbard_reference(label)); });
  mod.def("hubbard_u0_ground_state",
          [](double j) { return to_numpy(hubbard_u0_ground_state(j)); }, py::arg("j") = 1.0);
  mod.def("save_state", [](const py::array_t<cplx>& psi, const std::string& path) {
    save_state(from_numpy(psi), path);
  });
  mod.def("load_state", [](const std::string& path) {
    double n = 1.0;
    auto s = load_state(path, &n);
    return py::make_tuple(to_numpy(s), n);
  });
  mod.def("translate_state", [](const py::array_t<cplx>& psi, int shift) {
    return to_numpy(translate_state(from_numpy(psi), shift));
  });

  mod.def("krylov_run",
          [](const PartitionedHamiltonian& H, const std::vector<py::array_t<cplx>>& refs,
             int n_max, double dtau, int r, int m, int p, const std::string& scheme,
             double s_cut, std::optional<py::array_t<cplx>> psi0) {
            ReferenceSet rs;
            for (const auto& a : refs) {
              rs.states.push_back(from_numpy(a));
              rs.labels.push_back("ref" + std::to_string(rs.labels.size()));
            }
            KrylovOptions opt;
            opt.n_max = n_max;
            opt.power = make_config(1, dtau, r, m, p, H.n_parts(), "product");
            opt.scheme = scheme == "direct" ? MatrixScheme::Direct : MatrixScheme::Variational;
            opt.s_cut = s_cut;
            State gs;
            const State* gsp = nullptr;
            if (psi0) {
              gs = from_numpy(*psi0);
              gsp = &gs;
            }
            const auto res = krylov_run(H, rs, opt, gsp);
            py::list out;
            for (const auto& pt : res.trace) {
              py::dict d;
              d["n"] = pt.n;
              d["e_ks"] = pt.e_ks;
              d["fidelity"] = pt.fidelity;
              d["cond_s"] = pt.cond_s;
              d["kept_dim"] = pt.kept_dim;
              out.append(std::move(d));
            }
            return out;
          },
          py::arg("hamiltonian"), py::arg("refs"), py::arg("n_max"), py::arg("dtau"),
          py::arg("r") = 1, py::arg("m") = 1, py::arg("p") = 3,
          py::arg("scheme") = "variational", py::arg("s_cut") = 1e-12,
          py::arg("psi0") = std::nullopt);

  mod.def("power_distance",
          [](const PartitionedHamiltonian& H, int n, double dtau, int r, int m, int p,
             int samples, std::uint64_t seed) {
            const auto cfg = make_config(n, dtau, r, m, p, H.n_parts(), "product");
            const auto est = power_distance(H, cfg, samples, seed);
            return py::make_tuple(est.d, est.stderr_d, est.cancellation.flagged);
          },
          py::arg("hamiltonian"), py::arg("n"), py::arg("dtau"), py::arg("r") = 0,
          py::arg("m") = 1, py::arg("p") = 3, py::arg("samples") = 16, py::arg("seed") = 1);

  mod.def("exact_sparse_moments",
          [](const PartitionedHamiltonian& H, const py::array_t<cplx>& psi, int n_max) {
            return exact_sparse_moments(H, from_numpy(psi), n_max);
          });
  mod.def("cumulants_from_moments", &cumulants_from_moments);
  mod.def("moments_from_cumulants", &moments_from_cumulants);
  mod.def("lanczos_from_moments", [](const std::vector<double>& mu) {
    const auto lan = lanczos_from_moments(mu);
    return py::make_tuple(lan.alpha, lan.beta);
  });

  mod.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
