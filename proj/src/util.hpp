#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace morphbb {

// Error hierarchy. Every failure mode raised by the library derives from
// morphbb::error so callers (CLI, tests) can distinguish usage errors from bugs.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};
struct invalid_group_error : error { using error::error; };
struct invalid_element_error : error { using error::error; };
struct invalid_code_error : error { using error::error; };
struct criterion_failure : error { using error::error; };
struct invalid_logical_error : error { using error::error; };
struct not_a_logical_error : error { using error::error; };
struct connectivity_violation : error { using error::error; };
struct unsupported_fragment_error : error { using error::error; };
struct invalid_state_error : error { using error::error; };
struct infeasible_syndrome_error : error { using error::error; };
struct shape_error : error { using error::error; };
struct parse_error : error { using error::error; };
struct construction_bug_error : error { using error::error; };

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Small counter-based PRNG; shot i of a run seeded with hash(master, i) so
// results are independent of how shots are split across workers.
struct Rng {
    uint64_t s0, s1;

    explicit Rng(uint64_t seed) {
        s0 = splitmix64(seed);
        s1 = splitmix64(s0 ^ 0x5851f42d4c957f2dULL);
        if (s0 == 0 && s1 == 0) s1 = 1;
    }
    static Rng for_shot(uint64_t master_seed, uint64_t shot) {
        return Rng(splitmix64(master_seed ^ splitmix64(shot + 0x243f6a8885a308d3ULL)));
    }
    uint64_t next() {
        // xoroshiro128+
        uint64_t a = s0, b = s1;
        uint64_t r = a + b;
        b ^= a;
        s0 = ((a << 55) | (a >> 9)) ^ b ^ (b << 14);
        s1 = (b << 36) | (b >> 28);
        return r;
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    // uniform integer in [0, n)
    uint64_t below(uint64_t n) {
        if (n <= 1) return 0;
        uint64_t threshold = (~n + 1) % n;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }
};

unsigned resolve_thread_count(int requested);

// Runs fn(job_index) for job_index in [0, n_jobs) across `threads` workers.
// Jobs are handed out in fixed-size blocks; any exception is rethrown once.
void parallel_for(std::size_t n_jobs, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace morphbb
