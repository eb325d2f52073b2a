#include "csqpt/validate.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "csqpt/errors.hpp"
#include "csqpt/io.hpp"
#include "csqpt/pipeline.hpp"

namespace csqpt {

FileKind file_kind_from_string(const std::string& name) {
  if (name == "density-matrix") return FileKind::DensityMatrixJson;
  if (name == "superoperator") return FileKind::SuperoperatorJson;
  if (name == "quadratures") return FileKind::QuadratureCsv;
  if (name == "probe-manifest") return FileKind::ProbeManifestJson;
  if (name == "response-fit") return FileKind::ResponseFitJson;
  if (name == "field") return FileKind::FieldCsv;
  if (name == "calibration") return FileKind::CalibrationCsv;
  if (name == "config") return FileKind::PipelineConfigJson;
  throw ValidationError("unknown file kind '" + name +
                        "'; expected one of density-matrix, superoperator, quadratures, "
                        "probe-manifest, response-fit, field, calibration, config");
}

std::string to_string(FileKind kind) {
  switch (kind) {
    case FileKind::DensityMatrixJson: return "density-matrix";
    case FileKind::SuperoperatorJson: return "superoperator";
    case FileKind::QuadratureCsv: return "quadratures";
    case FileKind::ProbeManifestJson: return "probe-manifest";
    case FileKind::ResponseFitJson: return "response-fit";
    case FileKind::FieldCsv: return "field";
    case FileKind::CalibrationCsv: return "calibration";
    case FileKind::PipelineConfigJson: return "config";
  }
  return "?";
}

namespace {

void check_density_matrix(const std::filesystem::path& path, ValidationReport& rep) {
  DensityMatrix rho = io::read_density_matrix(path);
  const int dim = rho.dim();
  for (int n = 0; n < dim; ++n)
    for (int m = 0; m < dim; ++m)
      if (!std::isfinite(rho.entry(n, m).real()) || !std::isfinite(rho.entry(n, m).imag())) {
        std::ostringstream os;
        os << "non-finite entry at rows[" << n << "][" << m << "]";
        rep.fail(os.str());
        return;
      }
  double worst = 0.0;
  int wn = 0, wm = 0;
  for (int n = 0; n < dim; ++n)
    for (int m = 0; m < dim; ++m) {
      const double d = std::abs(rho.entry(n, m) - std::conj(rho.entry(m, n)));
      if (d > worst) {
        worst = d;
        wn = n;
        wm = m;
      }
    }
  if (worst > kHermitianTol) {
    std::ostringstream os;
    os << "not Hermitian: |rows[" << wn << "][" << wm << "] - conj(rows[" << wm << "]["
       << wn << "])| = " << worst;
    rep.fail(os.str());
  }
  const double tr = rho.trace_real();
  if (std::abs(tr - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "trace " << std::setprecision(12) << tr << " deviates from 1";
    rep.fail(os.str());
  }
  const double mineig = rho.min_eigenvalue();
  if (mineig < -0.01) {
    std::ostringstream os;
    os << "strongly indefinite: min eigenvalue " << mineig;
    rep.fail(os.str());
  }
}

void check_superoperator(const std::filesystem::path& path, ValidationReport& rep) {
  Superoperator sop = io::read_superoperator(path);
  for (const auto& z : sop.tensor)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      rep.fail("non-finite tensor entry");
      return;
    }
  double herm = 0.0;
  for (int n = 0; n < sop.dim_in; ++n)
    for (int m = 0; m < sop.dim_in; ++m)
      for (int l = 0; l < sop.dim_out; ++l)
        for (int k = 0; k < sop.dim_out; ++k)
          herm = std::max(herm,
                          std::abs(sop.at(l, k, n, m) - std::conj(sop.at(k, l, m, n))));
  if (herm > 1e-8) {
    std::ostringstream os;
    os << "Hermiticity-preservation defect " << herm << " exceeds 1e-8";
    rep.fail(os.str());
  }
  if (sop.phase_symmetric) {
    for (int n = 0; n < sop.dim_in; ++n)
      for (int m = 0; m < sop.dim_in; ++m)
        for (int l = 0; l < sop.dim_out; ++l)
          for (int k = 0; k < sop.dim_out; ++k)
            if (l - k != n - m && sop.at(l, k, n, m) != Complex(0.0, 0.0)) {
              std::ostringstream os;
              os << "claims phase symmetry but E[" << l << "][" << k << "][" << n << "]["
                 << m << "] != 0";
              rep.fail(os.str());
              return;
            }
  }
}

void check_quadratures(const std::filesystem::path& path, ValidationReport& rep) {
  HomodyneDataset data = io::read_quadratures(path);
  (void)data;  // read_quadratures already rejects non-finite rows with line numbers
  (void)rep;
}

void check_field_csv(const std::filesystem::path& path, ValidationReport& rep) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || (line != "x,p,re,im" && line != "k_x,k_p,re,im")) {
    rep.fail("expected header 'x,p,re,im' or 'k_x,k_p,re,im'");
    return;
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    int cells = 0;
    while (std::getline(row, cell, ',')) {
      ++cells;
      try {
        const double v = std::stod(cell);
        if (!std::isfinite(v)) throw std::invalid_argument("nan");
      } catch (const std::exception&) {
        std::ostringstream os;
        os << "line " << lineno << ": non-finite or unparsable value '" << cell << "'";
        rep.fail(os.str());
        return;
      }
    }
    if (cells != 4) {
      std::ostringstream os;
      os << "line " << lineno << ": expected 4 columns, found " << cells;
      rep.fail(os.str());
      return;
    }
  }
}

void check_calibration_csv(const std::filesystem::path& path, ValidationReport& rep) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "n,value") {
    rep.fail("expected header 'n,value'");
    return;
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const size_t comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      (void)std::stoi(line.substr(0, comma));
      const double v = std::stod(line.substr(comma + 1));
      if (!std::isfinite(v)) throw std::invalid_argument("nan");
    } catch (const std::exception&) {
      std::ostringstream os;
      os << "line " << lineno << ": expected 'n,value'";
      rep.fail(os.str());
      return;
    }
  }
}

}  // namespace

ValidationReport validate_file(const std::filesystem::path& path, FileKind kind) {
  if (!std::filesystem::exists(path))
    throw ValidationError("no such file: " + path.string());
  ValidationReport rep;
  try {
    switch (kind) {
      case FileKind::DensityMatrixJson: check_density_matrix(path, rep); break;
      case FileKind::SuperoperatorJson: check_superoperator(path, rep); break;
      case FileKind::QuadratureCsv: check_quadratures(path, rep); break;
      case FileKind::ProbeManifestJson: io::read_probe_manifest(path); break;
      case FileKind::ResponseFitJson: io::read_response_fit(path); break;
      case FileKind::FieldCsv: check_field_csv(path, rep); break;
      case FileKind::CalibrationCsv: check_calibration_csv(path, rep); break;
      case FileKind::PipelineConfigJson: load_pipeline_config(path); break;
    }
  } catch (const ValidationError& e) {
    rep.fail(e.what());
  } catch (const NumericalContractError& e) {
    rep.fail(e.what());
  }
  return rep;
}

PlotKind plot_kind_from_string(const std::string& name) {
  if (name == "wigner") return PlotKind::WignerGrid;
  if (name == "pfunc") return PlotKind::PfuncGrid;
  if (name == "sop-diagonal") return PlotKind::SuperoperatorDiagonal;
  if (name == "calibration") return PlotKind::CalibrationCurve;
  throw ValidationError("unknown plot kind '" + name +
                        "'; expected wigner, pfunc, sop-diagonal or calibration");
}

void plot_export(const std::filesystem::path& artifact, PlotKind kind,
                 const std::filesystem::path& out, const PlotOptions& opts) {
  switch (kind) {
    case PlotKind::WignerGrid: {
      DensityMatrix rho = io::read_density_matrix(artifact);
      io::write_field(out, wigner(rho, opts.grid));
      break;
    }
    case PlotKind::PfuncGrid: {
      DensityMatrix rho = io::read_density_matrix(artifact);
      io::write_field(out, regularized_p(rho, opts.L, opts.grid));
      break;
    }
    case PlotKind::SuperoperatorDiagonal: {
      Superoperator sop = io::read_superoperator(artifact);
      std::ofstream os(out);
      if (!os) throw ValidationError("cannot write " + out.string());
      os << "m,k,value\n" << std::setprecision(17);
      for (int m = 0; m < sop.dim_in; ++m)
        for (int k = 0; k < sop.dim_out; ++k)
          os << m << "," << k << "," << sop.at(k, k, m, m).real() << "\n";
      break;
    }
    case PlotKind::CalibrationCurve: {
      ValidationReport rep = validate_file(artifact, FileKind::CalibrationCsv);
      if (!rep.ok) throw ValidationError("invalid calibration CSV: " + rep.diagnostics.front());
      std::ifstream in(artifact);
      std::ofstream os(out);
      if (!os) throw ValidationError("cannot write " + out.string());
      os << in.rdbuf();
      break;
    }
  }
}

}  // namespace csqpt
