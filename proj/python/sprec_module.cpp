// python/sprec_module.cpp

// Copyright 2026  The sprec authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sprec/config.hpp"
#include "sprec/corpus.hpp"
#include "sprec/eval.hpp"
#include "sprec/frontend.hpp"
#include "sprec/models.hpp"
#include "sprec/transforms.hpp"

namespace py = pybind11;
using namespace sprec;

namespace {

Matrix matrix_from_numpy(const py::array_t<double, py::array::c_style |
                                                        py::array::forcecast>& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  Matrix m(static_cast<std::size_t>(arr.shape(0)),
           static_cast<std::size_t>(arr.shape(1)));
  std::copy(arr.data(), arr.data() + m.size(), m.data());
  return m;
}

py::array_t<double> matrix_to_numpy(const Matrix& m) {
  py::array_t<double> arr({m.rows(), m.cols()});
  std::copy(m.data(), m.data() + m.size(), arr.mutable_data());
  return arr;
}

std::vector<double> vec_from_numpy(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
  return {arr.data(), arr.data() + arr.shape(0)};
}

FeatureSequence features_from_numpy(const py::array_t<double>& arr) {
  FeatureSequence seq;
  seq.vectors = matrix_from_numpy(arr);
  return seq;
}

frontend::ExtractResult extract_result_from_numpy(const py::array_t<double>& lpcc,
                                                  const py::array_t<double>& lpc) {
  frontend::ExtractResult fr;
  fr.features.vectors = matrix_from_numpy(lpcc);
  fr.lpc = matrix_from_numpy(lpc);
  return fr;
}

py::dict table_to_dict(const ResultTable& table) {
  py::dict out;
  out["rows"] = table.row_names;
  out["cols"] = table.col_names;
  py::list cells;
  for (std::size_t r = 0; r < table.row_names.size(); ++r) {
    py::list row;
    for (std::size_t c = 0; c < table.col_names.size(); ++c) {
      const Cell& cell = table.at(r, c);
      py::dict d;
      d["ok"] = cell.ok;
      if (cell.ok) {
        d["value"] = cell.value;
        if (cell.has_pair) d["value2"] = cell.value2;
      } else {
        d["error"] = cell.error;
      }
      row.append(d);
    }
    cells.append(row);
  }
  out["cells"] = cells;
  return out;
}

}  // namespace

PYBIND11_MODULE(sprec, m) {
  m.doc() = "LPCC speaker identification and verification toolkit";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");

  py::class_<FrontendConfig>(m, "FrontendConfig")
      .def(py::init<>())
      .def_readwrite("preemphasis", &FrontendConfig::preemphasis)
      .def_readwrite("frame_len", &FrontendConfig::frame_len)
      .def_readwrite("frame_shift", &FrontendConfig::frame_shift)
      .def_readwrite("lpc_order", &FrontendConfig::lpc_order)
      .def_readwrite("cepstrum_order", &FrontendConfig::cepstrum_order)
      .def_readwrite("energy_floor_db", &FrontendConfig::energy_floor_db)
      .def_static("vq_preset", &FrontendConfig::vq_preset)
      .def_static("cm_preset", &FrontendConfig::cm_preset);

  m.def(
      "preemphasize",
      [](const py::array_t<double>& samples, double coeff, int rate) {
        AudioClip clip{vec_from_numpy(samples), rate};
        const AudioClip out = frontend::preemphasize(clip, coeff);
        return py::array_t<double>(py::ssize_t(out.samples.size()), out.samples.data());
      },
      py::arg("samples"), py::arg("coeff") = 0.95, py::arg("rate") = 8000);

  m.def(
      "extract",
      [](const py::array_t<double>& samples, int rate, const FrontendConfig& cfg) {
        AudioClip clip{vec_from_numpy(samples), rate};
        const frontend::ExtractResult fr = frontend::extract(clip, cfg);
        py::dict out;
        out["lpcc"] = matrix_to_numpy(fr.features.vectors);
        out["lpc"] = matrix_to_numpy(fr.lpc);
        out["frames_total"] = fr.frames_total;
        out["frames_gated"] = fr.frames_gated;
        out["frames_degenerate"] = fr.frames_degenerate;
        return out;
      },
      py::arg("samples"), py::arg("rate") = 8000,
      py::arg("config") = FrontendConfig::vq_preset());

  m.def(
      "lpc_to_lpcc",
      [](const py::array_t<double>& a, int q) {
        const std::vector<double> c = frontend::lpc_to_lpcc(vec_from_numpy(a), q);
        return py::array_t<double>(py::ssize_t(c.size()), c.data());
      },
      py::arg("a"), py::arg("q"));

  m.def(
      "acw",
      [](const py::array_t<double>& lpc, int q) {
        return matrix_to_numpy(transforms::acw(matrix_from_numpy(lpc), q).vectors);
      },
      py::arg("lpc"), py::arg("q"));

  m.def(
      "apply_chain",
      [](const std::string& chain, const py::array_t<double>& lpcc,
         const py::array_t<double>& lpc, py::object sigma) {
        const TransformChain parsed = TransformChain::parse(chain);
        frontend::ExtractResult fr = extract_result_from_numpy(lpcc, lpc);
        SigmaWeights weights;
        const SigmaWeights* ptr = nullptr;
        if (!sigma.is_none()) {
          weights.w = vec_from_numpy(sigma.cast<py::array_t<double>>());
          ptr = &weights;
        }
        return matrix_to_numpy(transforms::apply_chain(parsed, fr, ptr).vectors);
      },
      py::arg("chain"), py::arg("lpcc"), py::arg("lpc"),
      py::arg("sigma") = py::none());

  m.def(
      "sigma_fit",
      [](const std::vector<py::array_t<double>>& corpus) {
        std::vector<FeatureSequence> seqs;
        seqs.reserve(corpus.size());
        for (const py::array_t<double>& arr : corpus) {
          seqs.push_back(features_from_numpy(arr));
        }
        const SigmaWeights w = transforms::sigma_fit(seqs);
        return py::array_t<double>(py::ssize_t(w.w.size()), w.w.data());
      },
      py::arg("corpus"));

  m.def(
      "train_vq",
      [](const py::array_t<double>& features, int bits, std::uint64_t seed) {
        return matrix_to_numpy(
            models::train_vq_random(features_from_numpy(features), bits, seed)
                .codewords);
      },
      py::arg("features"), py::arg("bits") = 6, py::arg("seed") = 1);

  m.def(
      "vq_score",
      [](const py::array_t<double>& codewords, const py::array_t<double>& features) {
        VqCodebook cb;
        cb.codewords = matrix_from_numpy(codewords);
        return models::vq_score(cb, features_from_numpy(features));
      },
      py::arg("codewords"), py::arg("features"));

  m.def(
      "train_cov",
      [](const py::array_t<double>& features, double ridge) {
        return matrix_to_numpy(
            models::train_cov(features_from_numpy(features), ridge).c);
      },
      py::arg("features"), py::arg("ridge") = 0.0);

  m.def(
      "sphericity",
      [](const py::array_t<double>& cj, const py::array_t<double>& ct) {
        CovarianceModel a, b;
        a.c = matrix_from_numpy(cj);
        b.c = matrix_from_numpy(ct);
        return models::sphericity(a, b);
      },
      py::arg("model_cov"), py::arg("test_cov"));

  m.def(
      "compute_eer",
      [](const std::vector<double>& client, const std::vector<double>& impostor) {
        return eval::compute_eer(client, impostor);
      },
      py::arg("client"), py::arg("impostor"));

  m.def(
      "identification_rate",
      [](const std::vector<std::pair<std::string, std::string>>& decisions) {
        return eval::identification_rate(decisions);
      },
      py::arg("decisions"));

  m.def(
      "synth_corpus",
      [](const std::string& out_dir, int n_speakers,
         const std::vector<std::string>& sessions,
         const std::vector<std::string>& channels,
         const std::vector<std::string>& languages, double train_s, double test_s,
         int tests, std::uint64_t seed) {
        corpus::SynthCorpusParams params;
        params.out_dir = out_dir;
        params.n_speakers = n_speakers;
        params.sessions = sessions;
        params.channels = channels;
        params.languages = languages;
        params.train_duration_s = train_s;
        params.test_duration_s = test_s;
        params.tests_per_condition = tests;
        params.master_seed = seed;
        const Manifest manifest = corpus::build_synth_corpus(params);
        py::dict out;
        out["manifest"] = out_dir + "/manifest.tsv";
        out["utterances"] = manifest.records.size();
        return out;
      },
      py::arg("out_dir"), py::arg("n_speakers") = 8,
      py::arg("sessions") = std::vector<std::string>{"S1"},
      py::arg("channels") = std::vector<std::string>{"M1"},
      py::arg("languages") = std::vector<std::string>{"c"},
      py::arg("train_s") = 60.0, py::arg("test_s") = 2.0, py::arg("tests") = 5,
      py::arg("seed") = 1);

  m.def(
      "decode_audio",
      [](const std::string& path) {
        const AudioClip clip = corpus::decode_audio(path);
        return py::make_tuple(
            py::array_t<double>(py::ssize_t(clip.samples.size()), clip.samples.data()),
            clip.sample_rate_hz);
      },
      py::arg("path"));

  m.def(
      "run_experiment",
      [](const std::string& config_path) {
        const ExperimentConfig config = ExperimentConfig::load(config_path);
        const ExperimentResult result = run_experiment_config(config);
        py::dict out;
        out["identification"] = table_to_dict(result.identification);
        out["eer"] = table_to_dict(result.eer);
        out["failed_cells"] = result.failed_cells;
        out["output_dir"] = config.output.dir;
        return out;
      },
      py::arg("config_path"));
}
