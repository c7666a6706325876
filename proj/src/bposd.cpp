#include "bposd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "util.hpp"

namespace morphbb {

DecoderConfig DecoderConfig::from_text(const std::string& key_values) {
    DecoderConfig c;
    std::istringstream in(key_values);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t\r");
            std::size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key == "bp_method") {
            if (val == "product_sum") c.bp_method = BpMethod::product_sum;
            else if (val == "minimum_sum") c.bp_method = BpMethod::minimum_sum;
            else throw parse_error("bad bp_method '" + val + "'");
        } else if (key == "max_iterations") {
            c.max_iterations = std::stoi(val);
        } else if (key == "osd_method") {
            if (val == "osd_0") c.osd_method = OsdMethod::osd_0;
            else if (val == "osd_cs") c.osd_method = OsdMethod::osd_cs;
            else throw parse_error("bad osd_method '" + val + "'");
        } else if (key == "osd_order") {
            c.osd_order = std::stoi(val);
        } else if (key == "min_sum_scale") {
            c.min_sum_scale = std::stod(val);
        } else if (!key.empty()) {
            throw parse_error("unknown decoder config key '" + key + "'");
        }
    }
    if (c.max_iterations < 1) throw error("max_iterations must be >= 1");
    if (c.osd_order < 0) throw error("osd_order must be >= 0");
    return c;
}

DecoderConfig DecoderConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open decoder config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

std::string DecoderConfig::to_text() const {
    std::ostringstream out;
    out << "bp_method=" << (bp_method == BpMethod::product_sum ? "product_sum" : "minimum_sum")
        << "\nmax_iterations=" << max_iterations
        << "\nosd_method=" << (osd_method == OsdMethod::osd_0 ? "osd_0" : "osd_cs")
        << "\nosd_order=" << osd_order << "\nmin_sum_scale=" << min_sum_scale << "\n";
    return out.str();
}

void SparseBinary::add_entry(uint32_t r, uint32_t c) {
    row_cols[r].push_back(c);
    col_rows[c].push_back(r);
}

SparseBinary SparseBinary::from_dense(const BitMat& m) {
    SparseBinary s;
    s.rows = m.rows;
    s.cols = m.cols;
    s.row_cols.resize(s.rows);
    s.col_rows.resize(s.cols);
    for (std::size_t r = 0; r < m.rows; r++)
        for (std::size_t c : m.r[r].ones()) s.add_entry(static_cast<uint32_t>(r), static_cast<uint32_t>(c));
    return s;
}

SparseBinary SparseBinary::from_dem(const DetectorErrorModel& dem, long extra_observable_row) {
    SparseBinary s;
    s.rows = dem.n_detectors + (extra_observable_row >= 0 ? 1 : 0);
    s.cols = dem.faults.size();
    s.row_cols.resize(s.rows);
    s.col_rows.resize(s.cols);
    for (std::size_t f = 0; f < dem.faults.size(); f++) {
        for (uint32_t d : dem.faults[f].detectors) s.add_entry(d, static_cast<uint32_t>(f));
        if (extra_observable_row >= 0) {
            for (uint32_t o : dem.faults[f].observables)
                if (o == static_cast<uint32_t>(extra_observable_row))
                    s.add_entry(static_cast<uint32_t>(dem.n_detectors), static_cast<uint32_t>(f));
        }
    }
    return s;
}

bool SparseBinary::syndrome_matches(const std::vector<uint8_t>& x, const BitVec& syndrome) const {
    for (std::size_t r = 0; r < rows; r++) {
        uint8_t acc = 0;
        for (uint32_t c : row_cols[r]) acc ^= x[c];
        if (acc != (syndrome.get(r) ? 1 : 0)) return false;
    }
    return true;
}

std::vector<double> priors_from_dem(const DetectorErrorModel& dem) {
    std::vector<double> p;
    p.reserve(dem.faults.size());
    for (const auto& f : dem.faults) p.push_back(f.p);
    return p;
}

namespace {

double clamp_llr(double v) { return std::max(-50.0, std::min(50.0, v)); }

}  // namespace

BpResult bp_decode(const SparseBinary& h, const std::vector<double>& prior_llr,
                   const BitVec& syndrome, const DecoderConfig& config) {
    if (prior_llr.size() != h.cols) throw shape_error("prior length != column count");
    if (syndrome.n != h.rows) throw shape_error("syndrome length != row count");

    BpResult res;
    res.posterior_llr = prior_llr;
    res.hard.assign(h.cols, 0);

    bool zero = !syndrome.any();
    if (zero) {  // nothing to explain
        res.converged = true;
        res.iterations = 0;
        return res;
    }

    // edge arrays indexed per (row, slot)
    std::vector<std::vector<double>> m_cv(h.rows), m_vc(h.rows);
    for (std::size_t r = 0; r < h.rows; r++) {
        m_cv[r].assign(h.row_cols[r].size(), 0.0);
        m_vc[r].assign(h.row_cols[r].size(), 0.0);
    }
    // var -> check initialization with priors
    for (std::size_t r = 0; r < h.rows; r++)
        for (std::size_t s = 0; s < h.row_cols[r].size(); s++)
            m_vc[r][s] = clamp_llr(prior_llr[h.row_cols[r][s]]);

    std::vector<double> acc(h.cols);
    std::vector<double> pref, suff;
    for (int it = 1; it <= config.max_iterations; it++) {
        // check update (flooding)
        for (std::size_t r = 0; r < h.rows; r++) {
            std::size_t deg = h.row_cols[r].size();
            if (deg == 0) continue;
            double sgn = syndrome.get(r) ? -1.0 : 1.0;
            if (config.bp_method == BpMethod::product_sum) {
                pref.assign(deg + 1, 1.0);
                suff.assign(deg + 1, 1.0);
                for (std::size_t s = 0; s < deg; s++)
                    pref[s + 1] = pref[s] * std::tanh(m_vc[r][s] / 2);
                for (std::size_t s = deg; s-- > 0;)
                    suff[s] = suff[s + 1] * std::tanh(m_vc[r][s] / 2);
                for (std::size_t s = 0; s < deg; s++) {
                    double prod = pref[s] * suff[s + 1];
                    prod = std::max(-0.999999999999, std::min(0.999999999999, prod));
                    m_cv[r][s] = clamp_llr(sgn * 2 * std::atanh(prod));
                }
            } else {
                // min-sum with configurable scaling
                double sign_all = sgn;
                double min1 = 1e300, min2 = 1e300;
                std::size_t arg1 = 0;
                for (std::size_t s = 0; s < deg; s++) {
                    double v = m_vc[r][s];
                    if (v < 0) sign_all = -sign_all;
                    double a = std::fabs(v);
                    if (a < min1) { min2 = min1; min1 = a; arg1 = s; }
                    else if (a < min2) { min2 = a; }
                }
                for (std::size_t s = 0; s < deg; s++) {
                    double v = m_vc[r][s];
                    double others_sign = sign_all * (v < 0 ? -1.0 : 1.0);
                    double mag = (s == arg1 ? min2 : min1);
                    if (mag > 1e299) mag = 0;
                    m_cv[r][s] = clamp_llr(others_sign * config.min_sum_scale * mag);
                }
            }
        }
        // var update + posterior
        acc = prior_llr;
        for (std::size_t r = 0; r < h.rows; r++)
            for (std::size_t s = 0; s < h.row_cols[r].size(); s++)
                acc[h.row_cols[r][s]] += m_cv[r][s];
        for (std::size_t c = 0; c < h.cols; c++) {
            res.posterior_llr[c] = acc[c];
            res.hard[c] = acc[c] < 0;
        }
        res.iterations = it;
        if (h.syndrome_matches(res.hard, syndrome)) {
            res.converged = true;
            return res;
        }
        for (std::size_t r = 0; r < h.rows; r++)
            for (std::size_t s = 0; s < h.row_cols[r].size(); s++)
                m_vc[r][s] = clamp_llr(acc[h.row_cols[r][s]] - m_cv[r][s]);
    }
    return res;
}

DecodeResult osd_postprocess(const SparseBinary& h, const std::vector<double>& reliability_llr,
                             const std::vector<double>& prior_llr, const BitVec& syndrome,
                             OsdMethod method, int order) {
    if (reliability_llr.size() != h.cols) throw shape_error("reliability length != column count");
    if (syndrome.n != h.rows) throw shape_error("syndrome length != row count");

    // most-suspect columns first; stable tie-break by column index
    std::vector<uint32_t> cols(h.cols);
    std::iota(cols.begin(), cols.end(), 0);
    std::stable_sort(cols.begin(), cols.end(), [&](uint32_t a, uint32_t b) {
        return reliability_llr[a] < reliability_llr[b];
    });

    // Column elimination where each working column carries its composition in
    // terms of original columns, so any reduced combination translates
    // directly into a candidate correction.
    struct Work {
        BitVec rows;  // residual rows
        BitVec expr;  // original columns entering this combination
    };
    std::vector<Work> pivots;
    std::vector<std::size_t> pivot_rows;
    std::vector<uint32_t> nonpivots;
    std::vector<BitVec> nonpivot_expr;  // original-column set reproducing the column

    auto reduce = [&](Work w) {
        for (std::size_t p = 0; p < pivots.size(); p++) {
            if (w.rows.get(pivot_rows[p])) {
                w.rows.xor_in(pivots[p].rows);
                w.expr.xor_in(pivots[p].expr);
            }
        }
        return w;
    };

    for (uint32_t c : cols) {
        Work w{BitVec(h.rows), BitVec(h.cols)};
        for (uint32_t r : h.col_rows[c]) w.rows.set(r);
        w.expr.set(c);
        w = reduce(std::move(w));
        std::size_t lead = w.rows.first_set();
        if (lead != w.rows.n) {
            pivot_rows.push_back(lead);
            pivots.push_back(std::move(w));
        } else {
            // the column's own bit cancels into a dependency pattern
            w.expr.flip(c);
            nonpivots.push_back(c);
            nonpivot_expr.push_back(std::move(w.expr));
        }
    }

    Work s{syndrome, BitVec(h.cols)};
    s = reduce(std::move(s));
    if (s.rows.any()) throw infeasible_syndrome_error("syndrome outside the column space");

    auto score_of = [&](const BitVec& expr) {
        double sc = 0;
        for (std::size_t c : expr.ones()) sc += std::max(prior_llr[c], 0.0) + 1e-9;
        return sc;
    };

    BitVec best = s.expr;
    double best_score = score_of(best);

    if (method == OsdMethod::osd_cs && order > 0) {
        // combination sweep: every weight-1 pattern, plus weight-2 patterns
        // within the first `order` non-pivot positions
        std::size_t sweep = std::min<std::size_t>(static_cast<std::size_t>(order), nonpivots.size());
        auto consider = [&](const BitVec& expr) {
            double sc = score_of(expr);
            if (sc < best_score) {
                best_score = sc;
                best = expr;
            }
        };
        for (std::size_t t = 0; t < nonpivots.size(); t++) {
            BitVec e1 = s.expr;
            e1.xor_in(nonpivot_expr[t]);
            e1.flip(nonpivots[t]);
            consider(e1);
            if (t >= sweep) continue;
            for (std::size_t u = t + 1; u < sweep; u++) {
                BitVec e2 = e1;
                e2.xor_in(nonpivot_expr[u]);
                e2.flip(nonpivots[u]);
                consider(e2);
            }
        }
    }

    DecodeResult out;
    out.bits.assign(h.cols, 0);
    for (std::size_t c : best.ones()) {
        out.bits[c] = 1;
        out.correction.push_back(static_cast<uint32_t>(c));
    }
    out.weight = out.correction.size();
    if (!h.syndrome_matches(out.bits, syndrome))
        throw construction_bug_error("OSD produced a non-solution");
    return out;
}

DecodeResult bposd_decode(const SparseBinary& h, const std::vector<double>& prior_p,
                          const BitVec& syndrome, const DecoderConfig& config) {
    if (prior_p.size() != h.cols) throw shape_error("prior length != column count");
    std::vector<double> prior_llr(h.cols);
    for (std::size_t c = 0; c < h.cols; c++) {
        double p = std::min(std::max(prior_p[c], 1e-14), 1.0 - 1e-14);
        prior_llr[c] = std::log((1 - p) / p);
    }
    BpResult bp = bp_decode(h, prior_llr, syndrome, config);
    if (bp.converged) {
        DecodeResult out;
        out.bits = bp.hard;
        out.converged = true;
        for (uint32_t c = 0; c < h.cols; c++)
            if (out.bits[c]) out.correction.push_back(c);
        out.weight = out.correction.size();
        return out;
    }
    return osd_postprocess(h, bp.posterior_llr, prior_llr, syndrome, config.osd_method,
                           config.osd_order);
}

}  // namespace morphbb
