#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dem.hpp"
#include "gf2.hpp"

namespace morphbb {

enum class BpMethod { product_sum, minimum_sum };
enum class OsdMethod { osd_0, osd_cs };

struct DecoderConfig {
    BpMethod bp_method = BpMethod::product_sum;
    int max_iterations = 100;
    OsdMethod osd_method = OsdMethod::osd_cs;
    int osd_order = 0;
    double min_sum_scale = 1.0;

    static DecoderConfig from_text(const std::string& key_values);
    static DecoderConfig from_file(const std::string& path);
    std::string to_text() const;
};

// Sparse binary parity-check structure (rows = checks, cols = faults/bits).
struct SparseBinary {
    std::size_t rows = 0, cols = 0;
    std::vector<std::vector<uint32_t>> row_cols;
    std::vector<std::vector<uint32_t>> col_rows;

    static SparseBinary from_dense(const BitMat& m);
    // detector rows, optionally with one observable row appended as an extra check
    static SparseBinary from_dem(const DetectorErrorModel& dem, long extra_observable_row = -1);
    void add_entry(uint32_t r, uint32_t c);
    bool syndrome_matches(const std::vector<uint8_t>& x, const BitVec& syndrome) const;
};

struct BpResult {
    std::vector<double> posterior_llr;
    std::vector<uint8_t> hard;
    bool converged = false;
    int iterations = 0;
};

BpResult bp_decode(const SparseBinary& h, const std::vector<double>& prior_llr,
                   const BitVec& syndrome, const DecoderConfig& config);

struct DecodeResult {
    std::vector<uint32_t> correction;  // fault indices, sorted
    std::vector<uint8_t> bits;         // dense indicator
    bool converged = false;            // BP satisfied the syndrome on its own
    std::size_t weight = 0;            // cardinality of the correction
};

// Ordered-statistics post-processing: sort columns by reliability, solve on an
// information set (OSD-0), then combination-sweep single and paired flips over
// the `order` most-suspect non-pivot columns, keeping the best soft score.
DecodeResult osd_postprocess(const SparseBinary& h, const std::vector<double>& reliability_llr,
                             const std::vector<double>& prior_llr, const BitVec& syndrome,
                             OsdMethod method, int order);

// Full BP+OSD pipeline; the returned correction always satisfies the syndrome.
DecodeResult bposd_decode(const SparseBinary& h, const std::vector<double>& prior_p,
                          const BitVec& syndrome, const DecoderConfig& config);

std::vector<double> priors_from_dem(const DetectorErrorModel& dem);

}  // namespace morphbb
