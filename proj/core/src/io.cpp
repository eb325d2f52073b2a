#include "csqpt/io.hpp"

#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "csqpt/errors.hpp"

namespace csqpt::io {

using nlohmann::json;

namespace {

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return j;
}

void save_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError(std::string(what) + ": expected [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

void write_density_matrix(const fs::path& path, const DensityMatrix& rho) {
  json rows = json::array();
  for (int n = 0; n < rho.dim(); ++n) {
    json row = json::array();
    for (int m = 0; m < rho.dim(); ++m) row.push_back(complex_to_json(rho.entry(n, m)));
    rows.push_back(std::move(row));
  }
  save_json(path, json{{"dim", rho.dim()}, {"rows", std::move(rows)}});
}

DensityMatrix read_density_matrix(const fs::path& path) {
  const json j = load_json(path);
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw ValidationError(path.string() + ": missing integer field 'dim'");
  const int dim = j["dim"].get<int>();
  if (dim < 1) throw ValidationError(path.string() + ": dim must be >= 1");
  if (!j.contains("rows") || !j["rows"].is_array() ||
      j["rows"].size() != static_cast<size_t>(dim))
    throw ValidationError(path.string() + ": 'rows' must be a dim-sized array");
  CMat m(dim, dim);
  for (int n = 0; n < dim; ++n) {
    const json& row = j["rows"][n];
    if (!row.is_array() || row.size() != static_cast<size_t>(dim)) {
      std::ostringstream os;
      os << path.string() << ": row " << n << " must hold dim entries";
      throw ValidationError(os.str());
    }
    for (int c = 0; c < dim; ++c) {
      std::ostringstream what;
      what << path.string() << ": rows[" << n << "][" << c << "]";
      m(n, c) = complex_from_json(row[c], what.str().c_str());
    }
  }
  return DensityMatrix::unchecked(std::move(m));
}

void write_superoperator(const fs::path& path, const Superoperator& sop) {
  json flat = json::array();
  for (const auto& z : sop.tensor) flat.push_back(complex_to_json(z));
  save_json(path, json{{"dim_in", sop.dim_in},
                       {"dim_out", sop.dim_out},
                       {"phase_symmetric", sop.phase_symmetric},
                       {"removed_mass_ratio", sop.removed_mass_ratio},
                       {"tensor", std::move(flat)}});
}

Superoperator read_superoperator(const fs::path& path) {
  const json j = load_json(path);
  for (const char* key : {"dim_in", "dim_out", "phase_symmetric", "tensor"}) {
    if (!j.contains(key))
      throw ValidationError(path.string() + ": missing field '" + key + "'");
  }
  const int din = j["dim_in"].get<int>(), dout = j["dim_out"].get<int>();
  if (din < 1 || dout < 1) throw ValidationError(path.string() + ": bad dimensions");
  Superoperator sop(din, dout);
  sop.phase_symmetric = j["phase_symmetric"].get<bool>();
  if (j.contains("removed_mass_ratio"))
    sop.removed_mass_ratio = j["removed_mass_ratio"].get<double>();
  const json& flat = j["tensor"];
  if (!flat.is_array() || flat.size() != sop.tensor.size()) {
    std::ostringstream os;
    os << path.string() << ": tensor must hold " << sop.tensor.size() << " entries";
    throw ValidationError(os.str());
  }
  for (size_t i = 0; i < sop.tensor.size(); ++i)
    sop.tensor[i] = complex_from_json(flat[i], "tensor entry");
  return sop;
}

void write_quadratures(const fs::path& path, const HomodyneDataset& data) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "phase_rad,quadrature\n" << std::setprecision(17);
  for (const auto& s : data.samples) out << s.phase << "," << s.value << "\n";
}

HomodyneDataset read_quadratures(const fs::path& path, double efficiency) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "phase_rad,quadrature")
    throw ValidationError(path.string() + ": expected header 'phase_rad,quadrature'");
  HomodyneDataset data;
  data.efficiency = efficiency;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": expected 'phase,value'";
      throw ValidationError(os.str());
    }
    try {
      const double phase = std::stod(line.substr(0, comma));
      const double value = std::stod(line.substr(comma + 1));
      if (!std::isfinite(phase) || !std::isfinite(value)) throw std::invalid_argument("nan");
      data.samples.push_back({phase, value});
    } catch (const std::exception&) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": non-finite or unparsable sample";
      throw ValidationError(os.str());
    }
  }
  data.validate();
  return data;
}

void write_field(const fs::path& path, const PhaseSpaceField& field) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  const bool pos = field.domain == FieldDomain::Position;
  out << (pos ? "x,p,re,im\n" : "k_x,k_p,re,im\n") << std::setprecision(17);
  const int npts = field.grid.points_per_axis;
  for (int i = 0; i < npts; ++i) {
    const double a = pos ? field.grid.axis_value(i) : field.grid.conjugate_axis_value(i);
    for (int j = 0; j < npts; ++j) {
      const double b = pos ? field.grid.axis_value(j) : field.grid.conjugate_axis_value(j);
      const Complex v = field.values(i, j);
      out << a << "," << b << "," << v.real() << "," << v.imag() << "\n";
    }
  }
}

void write_probe_manifest(const fs::path& path,
                          const std::vector<std::pair<Amplitude, std::string>>& entries) {
  json arr = json::array();
  for (const auto& [alpha, file] : entries)
    arr.push_back(json{{"alpha", complex_to_json(alpha)}, {"output_file", file}});
  save_json(path, arr);
}

std::vector<ProbeRecord> read_probe_manifest(const fs::path& path) {
  const json j = load_json(path);
  if (!j.is_array() || j.empty())
    throw ValidationError(path.string() + ": manifest must be a nonempty array");
  const fs::path base = path.parent_path();
  std::vector<ProbeRecord> probes;
  probes.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (!e.contains("alpha") || !e.contains("output_file")) {
      std::ostringstream os;
      os << path.string() << ": entry " << i << " needs 'alpha' and 'output_file'";
      throw ValidationError(os.str());
    }
    const Amplitude alpha = complex_from_json(e["alpha"], "alpha");
    fs::path file = e["output_file"].get<std::string>();
    if (file.is_relative()) file = base / file;
    probes.push_back({alpha, read_density_matrix(file)});
  }
  return probes;
}

void write_response_fit(const fs::path& path, const InterpolatedResponse& fit) {
  json mean = json::array();
  for (const auto& c : fit.mean_fit) mean.push_back(complex_to_json(c));
  json cents = json::array();
  for (long e = 0; e < fit.centered_fits.rows(); ++e) {
    json row = json::array();
    for (int c = 0; c <= fit.degree; ++c) row.push_back(complex_to_json(fit.centered_fits(e, c)));
    cents.push_back(std::move(row));
  }
  save_json(path, json{{"dim", fit.dim},
                       {"degree", fit.degree},
                       {"mean_degree", fit.mean_degree},
                       {"amplitudes", fit.amplitudes},
                       {"mean_amp_fit", std::move(mean)},
                       {"centered_fits", std::move(cents)},
                       {"phase_symmetric", fit.phase_symmetric},
                       {"fidelity_threshold", fit.fidelity_threshold},
                       {"min_probe_fidelity", fit.min_probe_fidelity},
                       {"max_element_residual", fit.max_element_residual}});
}

InterpolatedResponse read_response_fit(const fs::path& path) {
  const json j = load_json(path);
  for (const char* key : {"dim", "degree", "mean_degree", "amplitudes", "mean_amp_fit",
                          "centered_fits", "phase_symmetric"}) {
    if (!j.contains(key))
      throw ValidationError(path.string() + ": missing field '" + key + "'");
  }
  InterpolatedResponse fit;
  fit.dim = j["dim"].get<int>();
  fit.degree = j["degree"].get<int>();
  fit.mean_degree = j["mean_degree"].get<int>();
  fit.amplitudes = j["amplitudes"].get<std::vector<double>>();
  fit.phase_symmetric = j["phase_symmetric"].get<bool>();
  if (j.contains("fidelity_threshold"))
    fit.fidelity_threshold = j["fidelity_threshold"].get<double>();
  if (j.contains("min_probe_fidelity"))
    fit.min_probe_fidelity = j["min_probe_fidelity"].get<double>();
  if (j.contains("max_element_residual"))
    fit.max_element_residual = j["max_element_residual"].get<double>();
  for (const json& c : j["mean_amp_fit"])
    fit.mean_fit.push_back(complex_from_json(c, "mean_amp_fit"));
  const json& cents = j["centered_fits"];
  const long nelems = static_cast<long>(fit.dim) * fit.dim;
  if (!cents.is_array() || static_cast<long>(cents.size()) != nelems)
    throw ValidationError(path.string() + ": centered_fits must hold dim^2 rows");
  fit.centered_fits.resize(nelems, fit.degree + 1);
  for (long e = 0; e < nelems; ++e) {
    const json& row = cents[e];
    if (!row.is_array() || static_cast<int>(row.size()) != fit.degree + 1)
      throw ValidationError(path.string() + ": centered_fits row size mismatch");
    for (int c = 0; c <= fit.degree; ++c)
      fit.centered_fits(e, c) = complex_from_json(row[c], "centered_fits entry");
  }
  fit.validate();
  return fit;
}

void write_calibration(const fs::path& path, const CalibrationCurve& curve) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "n,value\n" << std::setprecision(17);
  for (size_t i = 0; i < curve.n_values.size(); ++i)
    out << curve.n_values[i] << "," << curve.parameter_values[i] << "\n";
}

}  // namespace csqpt::io
