#ifndef DEEPALM_RNG_HPP
#define DEEPALM_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace deepalm {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_key(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x243F6A8885A308D3ULL;
    for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
    return h;
}

enum class StreamTag : std::uint64_t { curve = 1, equity = 2, shuffle = 3, init = 4 };

// Counter-based bit generator: the n-th output depends only on (key, n), so
// any (seed, scenario, time, tag) substream can be opened independently of
// the order in which other substreams were consumed.
class CounterStream {
public:
    using result_type = std::uint64_t;

    explicit CounterStream(std::uint64_t key) : key_(key) {}
    CounterStream(std::uint64_t seed, std::uint64_t scenario, std::uint64_t time, StreamTag tag)
        : key_(hash_key({seed, scenario, time, static_cast<std::uint64_t>(tag)})) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(key_ ^ splitmix64(counter_++)); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace deepalm

#endif  // DEEPALM_RNG_HPP
