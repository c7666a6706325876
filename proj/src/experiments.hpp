#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bposd.hpp"
#include "circuit.hpp"
#include "dem.hpp"
#include "morph.hpp"

namespace morphbb {

enum class MemoryKind { z_memory, x_memory, bell_memory };

MemoryKind parse_memory_kind(const std::string& s);
const char* memory_kind_name(MemoryKind k);

// Fully annotated memory experiment starting from the end-cycle code C~_1.
//
// z/x_memory: transversal preparation and readout of the data qubits, with
// detectors discovered automatically from stabilizer determinism and the
// chosen logical emitted as an observable (or as a detector, for the
// circuit-distance probe). logical_index = -1 emits all k logicals.
//
// bell_memory: an ideal encoding layer entangles the k logicals with k
// noiseless reference qubits; after `rounds` noisy QEC rounds every stabilizer
// of the final end-cycle code and each tracked logical pair is measured
// through a noiseless ancilla, giving 2k observables.
Circuit memory_experiment(const MorphingProtocol& protocol, MemoryKind kind, int rounds,
                          const std::optional<NoiseParams>& noise,
                          bool logical_as_detector = false, int logical_index = -1);

// Inserts single-qubit X (or Z) error channels on the first `n_code_qubits`
// qubits after every TICK, realizing the every-space-time-location probe model.
Circuit insert_probe_noise(const Circuit& c, double p, bool x_errors, std::size_t n_code_qubits);

// Rewrites the trailing DETECTOR/OBSERVABLE block in a fault-sparser basis.
void improve_detector_basis(Circuit& c, unsigned threads = 0);

struct CircuitDistanceResult {
    int bound = 0;                  // min over logicals
    std::vector<int> per_logical;
};

// Upper bound on the circuit-level distance per side: side 'Z' probes
// single-qubit X faults against the Z logicals of a one-round Z-basis memory
// experiment, side 'X' the mirror image. BP-OSD is fed the all-zero syndrome
// with the logical row set to one.
CircuitDistanceResult circuit_distance_upper(const MorphingProtocol& protocol, char side,
                                             const DecoderConfig* config_override = nullptr,
                                             unsigned threads = 0);
int circuit_distance_upper_both(const MorphingProtocol& protocol,
                                const DecoderConfig* config_override = nullptr,
                                unsigned threads = 0);

struct LogicalErrorResult {
    std::size_t shots = 0, failures = 0;
    double rate = 0, ci_low = 0, ci_high = 0;  // Wilson 95% interval
};

LogicalErrorResult logical_error_rate(const MorphingProtocol& protocol, MemoryKind kind,
                                      int rounds, double p, std::size_t shots,
                                      const DecoderConfig& config, uint64_t seed,
                                      unsigned threads = 0);

// Decodes a batch of sampled shots against a DEM; returns the failure count
// (any observable mispredicted).
std::size_t decode_shots(const DetectorErrorModel& dem, const ShotRecords& records,
                         const DecoderConfig& config, unsigned threads = 0);

// Leading-order (two-fault sector) estimate of the logical failure rate:
// importance-samples fault pairs with weight p_f p_g, decodes each pair's
// syndrome, and scales the failing fraction by sum_{f<g} p_f p_g e^{-S1}.
double two_fault_leading_estimate(const DetectorErrorModel& dem, const DecoderConfig& config,
                                  std::size_t samples, uint64_t seed, unsigned threads = 0);

struct WilsonInterval {
    double low = 0, high = 0;
};
WilsonInterval wilson95(std::size_t failures, std::size_t shots);

}  // namespace morphbb
