// Python bindings for graph generation, channels, bounds, experiments and ingestion.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "deanon/attacker.hpp"
#include "deanon/bounds.hpp"
#include "deanon/channel.hpp"
#include "deanon/config.hpp"
#include "deanon/emit.hpp"
#include "deanon/experiment.hpp"
#include "deanon/generator.hpp"
#include "deanon/snap.hpp"

namespace py = pybind11;
using namespace deanon;

namespace {

// nlohmann::json -> Python objects through the json module.
py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_python(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

std::vector<std::pair<UserId, GroupId>> edges_of(const BipartiteGraph& g) {
  std::vector<std::pair<UserId, GroupId>> out;
  out.reserve(g.num_edges());
  for (GroupId j = 0; j < g.num_groups(); ++j) {
    for (UserId k : g.members(j)) out.emplace_back(k, j);
  }
  return out;
}

py::dict summary_dict(const ExperimentResult& r) {
  py::dict d = to_python(to_json(r.summary));
  py::list records;
  for (const auto& rec : r.records) {
    py::dict x;
    x["replicate"] = rec.replicate;
    x["trial"] = rec.trial;
    x["victim"] = rec.victim;
    x["q"] = rec.q;
    x["correct"] = rec.correct;
    x["exhausted"] = rec.exhausted;
    x["identified"] = rec.identified ? py::cast(*rec.identified) : py::none();
    x["error"] = rec.error;
    records.append(x);
  }
  d["records"] = records;
  return d;
}

}  // namespace

PYBIND11_MODULE(_deanon, m) {
  m.doc() = "Active deanonymization of bipartite membership networks";

  py::class_<BinaryChannel>(m, "BinaryChannel")
      .def(py::init<>())
      .def("__call__", &BinaryChannel::operator(), py::arg("out"), py::arg("input"))
      .def_property_readonly("matrix", [](const BinaryChannel& c) {
        const auto& p = c.matrix();
        return std::vector<std::vector<double>>{{p[0][0], p[0][1]}, {p[1][0], p[1][1]}};
      })
      .def("__eq__", [](const BinaryChannel& a, const BinaryChannel& b) { return a == b; });

  m.def("identity", &channels::identity);
  m.def("bsc", &channels::bsc, py::arg("p"));
  m.def("omission", &channels::omission, py::arg("s"));
  m.def("constant", &channels::constant, py::arg("q"));
  m.def("mixture", &channels::mixture, py::arg("w"), py::arg("a"), py::arg("b"));
  m.def("compose", &channels::compose, py::arg("first"), py::arg("second"));
  m.def("mutual_information", &channels::mutual_information, py::arg("p1"), py::arg("channel"));
  m.def("binary_kl", &channels::binary_kl, py::arg("p"), py::arg("q"));
  m.def("i_max", &channels::i_max, py::arg("p1"), py::arg("channel"));
  m.def(
      "posterior",
      [](double p1, const BinaryChannel& c) {
        // rows are scanned outputs, None where the output is impossible
        const auto post = channels::posterior(p1, c);
        py::list rows;
        for (int out = 0; out < 2; ++out) {
          if (!post.defined[out]) {
            rows.append(py::none());
            continue;
          }
          rows.append(py::make_tuple(post(0, out), post(1, out)));
        }
        return rows;
      },
      py::arg("p1"), py::arg("channel"));

  py::class_<GenerationParams>(m, "GenerationParams")
      .def_static("alpha_pa", &GenerationParams::alpha_pa, py::arg("n"), py::arg("m"), py::arg("mu"),
                  py::arg("alpha"))
      .def_static("stochastic_block", &GenerationParams::stochastic_block, py::arg("m"), py::arg("mu"),
                  py::arg("tau0"))
      .def_static("iee", &GenerationParams::iee, py::arg("n"), py::arg("m"), py::arg("mu"))
      .def_readonly("n", &GenerationParams::n)
      .def_readonly("m", &GenerationParams::m)
      .def_readonly("mu", &GenerationParams::mu)
      .def_readonly("alpha", &GenerationParams::alpha)
      .def_property_readonly("beta", &GenerationParams::beta)
      .def_property_readonly("delta", &GenerationParams::delta);

  py::class_<BipartiteGraph>(m, "BipartiteGraph")
      .def_property_readonly("num_users", &BipartiteGraph::num_users)
      .def_property_readonly("num_groups", &BipartiteGraph::num_groups)
      .def_property_readonly("num_edges", &BipartiteGraph::num_edges)
      .def("members", [](const BipartiteGraph& g, GroupId j) {
        const auto s = g.members(j);
        return std::vector<UserId>(s.begin(), s.end());
      })
      .def("groups_of", [](const BipartiteGraph& g, UserId k) {
        const auto s = g.groups_of(k);
        return std::vector<GroupId>(s.begin(), s.end());
      })
      .def("fingerprint", [](const BipartiteGraph& g, UserId k) { return g.fingerprint(k); })
      .def("edges", &edges_of)
      .def("__eq__", [](const BipartiteGraph& a, const BipartiteGraph& b) { return a == b; });

  m.def(
      "generate",
      [](const GenerationParams& params, std::uint64_t seed) {
        Rng rng = Rng::stream(seed, {stream_tag::kGen, 0});
        auto gt = generate_ground_truth(params, rng);
        return py::make_tuple(std::move(gt.graph), gt.skipped_steps.size());
      },
      py::arg("params"), py::arg("seed") = 1, "Returns (graph, skipped_steps).");

  m.def(
      "scan",
      [](const BipartiteGraph& truth, const BinaryChannel& channel, std::uint64_t seed) {
        NoiseModel noise = NoiseModel::noiseless(truth.num_users());
        noise.gamma_channels[0].channel = channel;
        Rng rng = Rng::stream(seed, {stream_tag::kScan, 0});
        return channels::scan_graph(truth, noise, rng);
      },
      py::arg("truth"), py::arg("channel"), py::arg("seed") = 1);

  m.def(
      "theorem1_bound",
      [](double edge_prior, const BinaryChannel& scan, std::size_t m, double epsilon, double c_prime) {
        return to_python(to_json(bounds::theorem1_bound(edge_prior, scan, VictimDistribution::uniform(m), epsilon,
                                                        c_prime)));
      },
      py::arg("edge_prior"), py::arg("scan"), py::arg("m"), py::arg("epsilon"), py::arg("c_prime") = 1.0,
      "Single-channel bound for a uniform victim over m users.");

  m.def(
      "bound_for_config",
      [](const py::object& config) {
        const auto b = bound_for(config_from_json(from_python(config)));
        return b ? to_python(to_json(*b)) : py::object(py::none());
      },
      py::arg("config"));

  m.def(
      "run_experiment",
      [](const py::object& config, std::size_t jobs) {
        const auto c = config_from_json(from_python(config));
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(c, jobs);
        }
        return summary_dict(r);
      },
      py::arg("config"), py::arg("jobs") = 1, "Runs a JSON-style config and returns the summary with records.");

  m.def(
      "results_csv",
      [](const py::object& config, std::size_t jobs) {
        const auto r = run_experiment(config_from_json(from_python(config)), jobs);
        return results_csv(r.records);
      },
      py::arg("config"), py::arg("jobs") = 1);

  m.def(
      "ingest",
      [](const std::string& path, std::size_t min_group_size, std::size_t min_user_memberships) {
        auto g = read_snap_communities(path, min_group_size, min_user_memberships);
        return py::make_tuple(std::move(g.graph), g.user_ids, to_python(to_json(g.manifest)));
      },
      py::arg("path"), py::arg("min_group_size") = 0, py::arg("min_user_memberships") = 0,
      "Returns (graph, original user ids, manifest).");
}
