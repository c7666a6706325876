#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "frame.hpp"

namespace morphbb {

// Sparse fault -> detector/observable model with per-fault probabilities.
// Equivalent faults (identical signature) are merged at extraction time.
struct DemFault {
    double p = 0.0;
    std::vector<uint32_t> detectors;
    std::vector<uint32_t> observables;
};

struct DetectorErrorModel {
    std::size_t n_detectors = 0;
    std::size_t n_observables = 0;
    std::vector<DemFault> faults;

    std::string to_text() const;
    static DetectorErrorModel from_text(const std::string& text);
};

// One fault entry per elementary error mechanism of each noise channel,
// obtained by single-fault frame probing of the circuit.
DetectorErrorModel enumerate_faults_dem(const Circuit& c, unsigned threads = 0);

// Samples detector/observable records directly from a DEM (independent faults,
// GF(2) composition). Matches the circuit sampler's distribution.
ShotRecords dem_sample_shots(const DetectorErrorModel& dem, std::size_t shots, uint64_t seed,
                             unsigned threads = 0);

}  // namespace morphbb
