#pragma once

#include <cmath>
#include <cstdint>

namespace fpplocal {

// Counter-based splittable random stream. A stream is identified by a
// 64-bit key derived from (master seed, stream index); outputs are a
// strong mix of key and counter, so replica k is reproducible without
// generating replicas 0..k-1 and derived substreams are independent of
// the parent's position.
class RngStream {
public:
    RngStream() : key_(mix(0xdeadbeefcafef00dULL)), ctr_(0) {}

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
        : key_(derive_key(master_seed, stream_index)), ctr_(0) {}

    // Independent stream addressed by (this stream's key, tag). Counter
    // position of the parent does not matter.
    RngStream substream(std::uint64_t tag) const {
        RngStream s;
        s.key_ = mix(key_ ^ mix(tag * 0xd6e8feb86659fd93ULL + 0x2545f4914f6cdd1dULL));
        s.ctr_ = 0;
        return s;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1), never exactly zero.
    double next_double_pos() {
        double u;
        do {
            u = next_double();
        } while (u == 0.0);
        return u;
    }

    // Uniform integer in [0, n); rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    bool bernoulli(double p) { return next_double() < p; }

    double exponential(double rate) { return -std::log(1.0 - next_double_pos()) / rate; }

    double uniform(double a, double b) { return a + next_double() * (b - a); }

    double weibull(double shape, double scale) {
        return scale * std::pow(-std::log(1.0 - next_double_pos()), 1.0 / shape);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 33;
        z *= 0xff51afd7ed558ccdULL;
        z ^= z >> 33;
        z *= 0xc4ceb9fe1a85ec53ULL;
        z ^= z >> 33;
        return z;
    }

    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
        return mix(mix(seed + 0x632be59bd9b4e019ULL) ^ (stream * 0xd6e8feb86659fd93ULL + 0x9e3779b97f4a7c15ULL));
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
};

} // namespace fpplocal
