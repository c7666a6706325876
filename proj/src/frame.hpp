#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "tableau.hpp"
#include "util.hpp"

namespace morphbb {

// Bit-packed per-shot detector/observable records.
struct ShotRecords {
    std::size_t shots = 0;
    std::size_t n_detectors = 0;
    std::size_t n_observables = 0;
    std::size_t det_stride = 0;  // words per shot
    std::size_t obs_stride = 0;
    std::vector<uint64_t> det_bits;
    std::vector<uint64_t> obs_bits;

    void init(std::size_t n_shots, std::size_t dets, std::size_t obs);
    bool det(std::size_t shot, std::size_t d) const {
        return (det_bits[shot * det_stride + (d >> 6)] >> (d & 63)) & 1;
    }
    bool obs(std::size_t shot, std::size_t o) const {
        return (obs_bits[shot * obs_stride + (o >> 6)] >> (o & 63)) & 1;
    }
    void set_det(std::size_t shot, std::size_t d) { det_bits[shot * det_stride + (d >> 6)] |= 1ULL << (d & 63); }
    void set_obs(std::size_t shot, std::size_t o) { obs_bits[shot * obs_stride + (o >> 6)] |= 1ULL << (o & 63); }

    // dense bit-packed binary file with a 32-byte header
    void write_file(const std::string& path) const;
    static ShotRecords read_file(const std::string& path);
};

// A single enumerated fault site inside a circuit.
struct FaultSite {
    std::size_t instr = 0;    // instruction index
    std::size_t slot = 0;     // target (or target-pair) index within the instruction
    int component = 0;        // pauli component: X_ERROR/Z_ERROR: 0; DEPOLARIZE2: 1..15; meas flip: 0
    double p = 0.0;
};

std::vector<FaultSite> enumerate_fault_sites(const Circuit& c);

// Pauli-frame simulation of one shot. If `inject` is non-null, the circuit is
// run noiselessly except for that single fault. Outputs flip bits per record.
void frame_run(const Circuit& c, Rng* rng, const FaultSite* inject,
               std::vector<uint8_t>& meas_flips, BitVec& det_flips, BitVec& obs_flips);

// Monte-Carlo sampling of detector/observable flip records; reproducible for a
// fixed seed and independent of thread count.
ShotRecords sample_shots(const Circuit& c, std::size_t shots, uint64_t seed, unsigned threads = 0);

}  // namespace morphbb
