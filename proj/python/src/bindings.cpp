#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <cstring>
#include <string>

#include "sphstereo/config.hpp"
#include "sphstereo/error.hpp"
#include "sphstereo/eval.hpp"
#include "sphstereo/geom.hpp"
#include "sphstereo/imageio.hpp"
#include "sphstereo/matcher.hpp"
#include "sphstereo/parallel.hpp"
#include "sphstereo/render.hpp"

namespace py = pybind11;
using namespace sphstereo;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (H, W) or (H, W, C) float32 array -> image.
EquirectImage to_image(const FloatArray& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw DomainError("image must have shape (H, W) or (H, W, C)");
  EquirectImage img(EquirectGrid{static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0))},
                    a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1);
  std::memcpy(img.samples.data(), a.data(), img.samples.size() * sizeof(float));
  img.validate();
  return img;
}

py::array_t<float> from_image(const EquirectImage& img) {
  std::vector<py::ssize_t> shape = {img.grid.height, img.grid.width};
  if (img.channels > 1) shape.push_back(img.channels);
  py::array_t<float> out(shape);
  std::memcpy(out.mutable_data(), img.samples.data(), img.samples.size() * sizeof(float));
  return out;
}

template <class Tag>
FieldMap<Tag> to_map(const DoubleArray& a) {
  if (a.ndim() != 2) throw DomainError("map must have shape (H, W)");
  FieldMap<Tag> m(EquirectGrid{static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0))});
  m.grid.validate();
  std::memcpy(m.values.data(), a.data(), m.values.size() * sizeof(double));
  return m;
}

template <class Tag>
py::array_t<double> from_map(const FieldMap<Tag>& m) {
  py::array_t<double> out({m.grid.height, m.grid.width});
  std::memcpy(out.mutable_data(), m.values.data(), m.values.size() * sizeof(double));
  return out;
}

Mask to_mask(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw DomainError("mask must have shape (H, W)");
  Mask m(EquirectGrid{static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0))});
  for (std::size_t k = 0; k < m.values.size(); ++k) m.values[k] = a.data()[k] ? 1 : 0;
  return m;
}

py::array_t<bool> from_mask(const Mask& m) {
  py::array_t<bool> out({m.grid.height, m.grid.width});
  for (std::size_t k = 0; k < m.values.size(); ++k) out.mutable_data()[k] = m.values[k] != 0;
  return out;
}

// Config keys given as a Python dict; values go through the file parser.
RunConfig to_config(const py::dict& entries, const std::vector<KeyValue>& base = {}) {
  RunConfig cfg;
  apply_config_entries(cfg, base);
  for (auto [k, v] : entries) {
    std::string value = py::str(v);
    if (py::isinstance<py::bool_>(v)) value = v.cast<bool>() ? "true" : "false";
    apply_config_entry(cfg, py::str(k), value);
  }
  cfg.validate();
  return cfg;
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["disp_mae"] = r.disp_mae;
  d["disp_rmse"] = r.disp_rmse;
  d["depth_mae"] = r.depth_mae;
  d["depth_rmse"] = r.depth_rmse;
  d["valid_pixel_count"] = r.valid_pixel_count;
  d["depth_pixel_count"] = r.depth_pixel_count;
  d["infinite_pred_count"] = r.infinite_pred_count;
  d["crop_fraction"] = r.crop_fraction;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spherical top-bottom stereo: rendering, matching and evaluation";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_RuntimeError);

  m.def("set_num_threads", &set_num_threads, py::arg("n"),
        "Worker count for parallel stages; 0 restores the default.");
  m.def("num_threads", &num_threads);

  m.def(
      "depth_to_disparity",
      [](py::array_t<double> polar, py::array_t<double> depth, double baseline) {
        const CameraRig rig(baseline);
        return py::vectorize([&rig](double t, double z) { return depth_to_disparity(rig, t, z); })(
            polar, depth);
      },
      py::arg("polar"), py::arg("depth"), py::arg("baseline") = 0.2);
  m.def(
      "disparity_to_depth",
      [](py::array_t<double> polar, py::array_t<double> disparity, double baseline) {
        const CameraRig rig(baseline);
        return py::vectorize([&rig](double t, double d) {
          return disparity_to_depth(rig, t, d).value_or(std::nan(""));
        })(polar, disparity);
      },
      py::arg("polar"), py::arg("disparity"), py::arg("baseline") = 0.2,
      "NaN where the disparity has no finite depth.");
  m.def(
      "polar_angle_map",
      [](int width, int height) { return polar_angle_map(EquirectGrid{width, height}); },
      py::arg("width"), py::arg("height"), "Polar angle of each row center in radians.");

  py::class_<SceneFile>(m, "Scene")
      .def_static("load", &load_scene, py::arg("path"))
      .def_static("parse", [](const std::string& text) { return parse_scene(text); },
                  py::arg("text"))
      .def_property_readonly("primitive_count",
                             [](const SceneFile& s) { return s.scene.primitives.size(); })
      .def_property_readonly("settings", [](const SceneFile& s) {
        py::dict d;
        for (const KeyValue& kv : s.settings) d[py::str(kv.key)] = kv.value;
        return d;
      });

  m.def(
      "render",
      [](const SceneFile& scene, const py::dict& config) {
        const RunConfig cfg = to_config(config, scene.settings);
        StereoPair pair;
        {
          py::gil_scoped_release release;
          pair = render_pair(scene.scene, CameraRig(cfg.baseline_m),
                             EquirectGrid{cfg.width, cfg.height});
        }
        py::dict d;
        d["top"] = from_image(pair.top_rgb);
        d["bottom"] = from_image(pair.bottom_rgb);
        d["depth"] = from_map(pair.top_depth);
        d["disparity"] = from_map(pair.gt_disparity);
        d["valid"] = from_mask(pair.gt_valid);
        return d;
      },
      py::arg("scene"), py::arg("config") = py::dict(),
      "Renders both views. Scene settings apply first, then config entries.");

  m.def(
      "match",
      [](const FloatArray& top, const FloatArray& bottom, const py::dict& config, bool use_sgm,
         bool subpixel, bool lr_check, int median_radius) {
        PipelineOptions opts = PipelineOptions::from_run_config(to_config(config));
        opts.use_sgm = use_sgm;
        opts.subpixel = subpixel;
        opts.lr_check = lr_check;
        opts.median_radius = median_radius;
        const EquirectImage t = to_image(top), b = to_image(bottom);
        DisparityMap d;
        {
          py::gil_scoped_release release;
          d = match_pair(t, b, opts);
        }
        return from_map(d);
      },
      py::arg("top"), py::arg("bottom"), py::arg("config") = py::dict(), py::arg("use_sgm") = true,
      py::arg("subpixel") = true, py::arg("lr_check") = false, py::arg("median_radius") = 0,
      "Disparity map in radians, NaN where invalid.");
  m.def(
      "match_bruteforce",
      [](const FloatArray& top, const FloatArray& bottom, const py::dict& config) {
        return from_map(match_bruteforce(to_image(top), to_image(bottom),
                                         MatchConfig::from_run_config(to_config(config))));
      },
      py::arg("top"), py::arg("bottom"), py::arg("config") = py::dict());

  m.def(
      "evaluate",
      [](const DoubleArray& pred, const DoubleArray& gt, py::object valid, double baseline,
         double crop_fraction) {
        const DisparityMap p = to_map<DisparityTag>(pred), g = to_map<DisparityTag>(gt);
        const Mask v = valid.is_none()
                           ? Mask(g.grid, 1)
                           : to_mask(valid.cast<py::array_t<bool, py::array::c_style |
                                                                      py::array::forcecast>>());
        return report_dict(compute_metrics(p, g, v, CameraRig(baseline), crop_fraction));
      },
      py::arg("pred"), py::arg("gt"), py::arg("valid") = py::none(), py::arg("baseline") = 0.2,
      py::arg("crop_fraction") = 0.05);
  m.def(
      "texture_mask",
      [](const FloatArray& image, int radius, double threshold) {
        return from_mask(texture_mask(to_image(image), radius, threshold));
      },
      py::arg("image"), py::arg("radius"), py::arg("threshold") = 0.01);
  m.def(
      "point_cloud",
      [](const DoubleArray& depth, py::object rgb) {
        const DepthMap d = to_map<DepthTag>(depth);
        EquirectImage color;
        if (!rgb.is_none()) color = to_image(rgb.cast<FloatArray>());
        const PointCloud pc = depth_to_pointcloud(d.grid, d, rgb.is_none() ? nullptr : &color);
        py::array_t<double> xyz({static_cast<py::ssize_t>(pc.size()), py::ssize_t{3}});
        for (std::size_t k = 0; k < pc.size(); ++k)
          for (int a = 0; a < 3; ++a) xyz.mutable_at(k, a) = pc.positions[k][a];
        return xyz;
      },
      py::arg("depth"), py::arg("rgb") = py::none(), "(N, 3) points for the valid depth pixels.");

  m.def("read_image", [](const std::string& path) { return from_image(read_image(path)); },
        py::arg("path"));
  m.def(
      "write_image",
      [](const FloatArray& image, const std::string& path) { write_image(to_image(image), path); },
      py::arg("image"), py::arg("path"));
  m.def(
      "read_floatmap",
      [](const std::string& path) { return from_map(read_floatmap<DisparityTag>(path)); },
      py::arg("path"), "PFM map with its optional mask applied as NaN.");
  m.def(
      "write_floatmap",
      [](const DoubleArray& map, const std::string& path) {
        write_floatmap(to_map<DisparityTag>(map), path);
      },
      py::arg("map"), py::arg("path"));
}
