#pragma once

#include <filesystem>
#include <string>

#include "csqpt/calibration.hpp"
#include "csqpt/mle.hpp"
#include "csqpt/proctensor.hpp"
#include "csqpt/superoperator.hpp"

namespace csqpt::io {

namespace fs = std::filesystem;

// DensityMatrix JSON: {"dim": d, "rows": [[[re,im], ...], ...]} row-major,
// photon numbers from 0.
void write_density_matrix(const fs::path& path, const DensityMatrix& rho);
DensityMatrix read_density_matrix(const fs::path& path);

// Superoperator JSON: {"dim_in", "dim_out", "phase_symmetric",
// "tensor": flat [re,im] list in row-major (l,k,n,m) order}.
void write_superoperator(const fs::path& path, const Superoperator& sop);
Superoperator read_superoperator(const fs::path& path);

// Quadrature CSV: header `phase_rad,quadrature`, one sample per row.
void write_quadratures(const fs::path& path, const HomodyneDataset& data);
HomodyneDataset read_quadratures(const fs::path& path, double efficiency = 1.0);

// Field CSV: header `x,p,re,im` (position) or `k_x,k_p,re,im` (frequency),
// one grid node per row.
void write_field(const fs::path& path, const PhaseSpaceField& field);

// Probe manifest JSON: [{"alpha": [re,im], "output_file": "..."}, ...];
// output paths resolve relative to the manifest's directory.
void write_probe_manifest(const fs::path& path,
                          const std::vector<std::pair<Amplitude, std::string>>& entries);
std::vector<ProbeRecord> read_probe_manifest(const fs::path& path);

// InterpolatedResponse JSON.
void write_response_fit(const fs::path& path, const InterpolatedResponse& fit);
InterpolatedResponse read_response_fit(const fs::path& path);

// Calibration CSV: header `n,value`.
void write_calibration(const fs::path& path, const CalibrationCurve& curve);

}  // namespace csqpt::io
