#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cstring>

#include "scriptid/scriptid.hpp"

namespace py = pybind11;
using namespace scriptid;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

GrayImage to_gray(const DoubleArray& a) {
  if (a.ndim() != 2) throw ParameterError("expected a 2-D array");
  const auto h = static_cast<std::size_t>(a.shape(0));
  const auto w = static_cast<std::size_t>(a.shape(1));
  std::vector<double> v(a.data(), a.data() + w * h);
  return GrayImage(w, h, std::move(v));
}

py::array_t<double> from_gray(const GrayImage& img) {
  py::array_t<double> out({img.height(), img.width()});
  std::copy(img.values().begin(), img.values().end(), out.mutable_data());
  return out;
}

py::array_t<std::complex<double>> from_grid(const ComplexGrid& g) {
  py::array_t<std::complex<double>> out({g.height(), g.width()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_python(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Eigen::MatrixXd to_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) throw ParameterError("expected a 2-D feature array");
  Eigen::MatrixXd m(a.shape(0), a.shape(1));
  for (py::ssize_t r = 0; r < a.shape(0); ++r)
    for (py::ssize_t c = 0; c < a.shape(1); ++c) m(r, c) = a.at(r, c);
  return m;
}

FilterBank bank_of(int size, double sigma, const std::string& step) {
  return make_filter_bank(size, sigma, parse_orientation_step(step));
}

PreprocessConfig preprocess_of(const std::string& polarity, const std::string& gabor_input, double smooth_sigma,
                               int smooth_radius) {
  PreprocessConfig p;
  p.polarity = parse_polarity(polarity);
  p.gabor_input = parse_gabor_input(gabor_input);
  p.smooth_sigma = smooth_sigma;
  p.smooth_radius = smooth_radius;
  return p;
}

py::array_t<double> feature_array(const FeatureVector& fv) {
  py::array_t<double> out(static_cast<py::ssize_t>(kFeatureCount));
  std::copy(fv.values.begin(), fv.values.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_scriptid, m) {
  m.doc() = "Gabor texture features, quad-tree blocks and an MLP for script identification.";

  auto base = py::register_exception<Error>(m, "ScriptIdError", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());

  m.attr("FEATURE_COUNT") = kFeatureCount;
  m.attr("DEFAULT_SIGMA") = kDefaultGaborSigma;
  m.attr("DEFAULT_KERNEL_SIZE") = kDefaultKernelSize;

  m.def("feature_names", &feature_column_names, "Column names of the 60-value feature vector.");

  m.def(
      "load_image", [](const std::filesystem::path& path) { return from_gray(to_grayscale(load_image(path))); },
      py::arg("path"), "Load a PNG or BMP page as a gray array in [0, 1].");

  m.def(
      "otsu_threshold", [](const DoubleArray& img) { return otsu_threshold(to_gray(img)); }, py::arg("image"),
      "Otsu threshold over the 256 gray levels.");

  m.def(
      "preprocess",
      [](const DoubleArray& img, const std::string& polarity, const std::string& gabor_input, double smooth_sigma,
         int smooth_radius) {
        return from_gray(preprocess_page(to_gray(img), preprocess_of(polarity, gabor_input, smooth_sigma, smooth_radius)));
      },
      py::arg("image"), py::arg("polarity") = "auto", py::arg("gabor_input") = "smoothed-binary",
      py::arg("smooth_sigma") = 1.0, py::arg("smooth_radius") = 3);

  m.def(
      "decompose",
      [](const DoubleArray& img, int level) {
        py::list blocks;
        for (const Block& b : decompose(to_gray(img), level).blocks) blocks.append(from_gray(b.pixels));
        return blocks;
      },
      py::arg("image"), py::arg("level"), "Quad-tree blocks in row-major order.");

  m.def(
      "gabor_kernel",
      [](int scale, int orientation, int size, double sigma, const std::string& step) {
        return from_grid(make_kernel(scale, orientation, size, sigma, parse_orientation_step(step)).values);
      },
      py::arg("scale"), py::arg("orientation"), py::arg("size") = kDefaultKernelSize,
      py::arg("sigma") = kDefaultGaborSigma, py::arg("step") = "pi/6");

  m.def(
      "convolve",
      [](const DoubleArray& img, int scale, int orientation, int size, double sigma, const std::string& step,
         bool direct) {
        const GaborKernel k = make_kernel(scale, orientation, size, sigma, parse_orientation_step(step));
        const GrayImage g = to_gray(img);
        return from_grid((direct ? convolve_direct(g, k) : convolve(g, k)).values);
      },
      py::arg("image"), py::arg("scale"), py::arg("orientation"), py::arg("size") = kDefaultKernelSize,
      py::arg("sigma") = kDefaultGaborSigma, py::arg("step") = "pi/6", py::arg("direct") = false);

  m.def(
      "block_features",
      [](const DoubleArray& block, int size, double sigma, const std::string& step) {
        return feature_array(extract_features(to_gray(block), bank_of(size, sigma, step)));
      },
      py::arg("block"), py::arg("size") = kDefaultKernelSize, py::arg("sigma") = kDefaultGaborSigma,
      py::arg("step") = "pi/6", "Energy/entropy features of one already preprocessed block.");

  m.def(
      "page_features",
      [](const DoubleArray& page, int level, int size, double sigma, const std::string& step,
         const std::string& polarity, const std::string& gabor_input, double smooth_sigma, int smooth_radius) {
        ExtractConfig cfg;
        cfg.level = level;
        cfg.preprocess = preprocess_of(polarity, gabor_input, smooth_sigma, smooth_radius);
        const auto blocks = extract_page(to_gray(page), bank_of(size, sigma, step), cfg);
        py::array_t<double> out({blocks.size(), kFeatureCount});
        double* dst = out.mutable_data();
        for (const auto& b : blocks) dst = std::copy(b.features.values.begin(), b.features.values.end(), dst);
        return out;
      },
      py::arg("page"), py::arg("level") = 2, py::arg("size") = kDefaultKernelSize,
      py::arg("sigma") = kDefaultGaborSigma, py::arg("step") = "pi/6", py::arg("polarity") = "auto",
      py::arg("gabor_input") = "smoothed-binary", py::arg("smooth_sigma") = 1.0, py::arg("smooth_radius") = 3,
      "Full pipeline on one page: one 60-value row per quad-tree block.");

  m.def(
      "synth_page",
      [](double orientation, double frequency, std::size_t width, std::size_t height, double noise, std::uint64_t seed,
         double duty) {
        return from_gray(gen_page(SynthClass{"", orientation, frequency, duty}, width, height, noise, seed));
      },
      py::arg("orientation"), py::arg("frequency"), py::arg("width") = 256, py::arg("height") = 256,
      py::arg("noise") = 0.1, py::arg("seed") = 42, py::arg("duty") = 0.35, "One synthetic grating page.");

  m.def(
      "evaluate",
      [](const std::vector<std::size_t>& truth, const std::vector<std::size_t>& predicted,
         const std::vector<std::vector<double>>& probabilities, std::vector<std::string> classes) {
        return to_python(to_json(evaluate(truth, predicted, probabilities, std::move(classes))));
      },
      py::arg("truth"), py::arg("predicted"), py::arg("probabilities"), py::arg("classes"));

  py::class_<StoredModel>(m, "Model")
      .def_static(
          "train",
          [](const DoubleArray& features, const std::vector<std::size_t>& labels, std::vector<std::string> classes,
             std::vector<int> hidden, int epochs, double lr, double momentum, std::uint64_t seed, double l2) {
            TrainConfig cfg;
            cfg.hidden_sizes = std::move(hidden);
            cfg.epochs = epochs;
            cfg.learning_rate = lr;
            cfg.momentum = momentum;
            cfg.seed = seed;
            cfg.l2 = l2;
            StoredModel s;
            s.model = train_mlp(to_matrix(features), labels, std::move(classes), cfg);
            return s;
          },
          py::arg("features"), py::arg("labels"), py::arg("classes"), py::arg("hidden") = std::vector<int>{35},
          py::arg("epochs") = 500, py::arg("lr") = 0.1, py::arg("momentum") = 0.9, py::arg("seed") = 42,
          py::arg("l2") = 0.0)
      .def_static("load", &load_model, py::arg("path"))
      .def(
          "save", [](const StoredModel& s, const std::filesystem::path& path) { save_model(path, s.model, s.extraction); },
          py::arg("path"))
      .def_property_readonly("classes", [](const StoredModel& s) { return s.model.class_labels; })
      .def_property(
          "extraction", [](const StoredModel& s) { return to_python(to_json(s.extraction)); },
          [](StoredModel& s, const py::object& o) { s.extraction = extraction_settings_from_json(from_python(o)); })
      .def(
          "predict_proba",
          [](const StoredModel& s, const DoubleArray& features) {
            const Eigen::MatrixXd rows = to_matrix(features);
            const Eigen::MatrixXd p = s.model.forward(s.model.scaler.transform(rows));
            py::array_t<double> out({p.rows(), p.cols()});
            for (Eigen::Index r = 0; r < p.rows(); ++r)
              for (Eigen::Index c = 0; c < p.cols(); ++c) out.mutable_at(r, c) = p(r, c);
            return out;
          },
          py::arg("features"))
      .def(
          "predict",
          [](const StoredModel& s, const DoubleArray& features) {
            const Eigen::MatrixXd rows = to_matrix(features);
            std::vector<std::string> labels;
            for (Eigen::Index r = 0; r < rows.rows(); ++r) {
              std::vector<double> row(rows.cols());
              for (Eigen::Index c = 0; c < rows.cols(); ++c) row[static_cast<std::size_t>(c)] = rows(r, c);
              labels.push_back(predict(s.model, row).label);
            }
            return labels;
          },
          py::arg("features"));
}
