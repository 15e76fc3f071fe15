#pragma once

#include <memory>
#include <ostream>
#include <string>

#include "uoro/linalg.hpp"
#include "uoro/rng.hpp"

namespace uoro {

// ---------------------------------------------------------------------------
// Influence balancing
// ---------------------------------------------------------------------------

// Linear system s' = A s + (theta, ..., theta, -theta, ..., -theta)^T with
// A[i][i] = A[i][i+1] = 1/2 (never stored densely). The objective targets
// the shallowest unit: loss 1/2 (s^1 - 1)^2.
struct InfluenceBalancingTask {
    std::size_t units = 23;
    std::size_t plus = 10;
};

// One application of the recurrence for a scalar parameter value.
Vec influence_step(const InfluenceBalancingTask& task, const Vec& s, double theta);

// Companion loss 1/2 (s^1 - 1)^2.
double influence_loss(const Vec& s);

// ---------------------------------------------------------------------------
// Character streams
// ---------------------------------------------------------------------------

struct Alphabet {
    std::string symbols;  // index -> character

    std::size_t size() const { return symbols.size(); }
    char at(std::size_t i) const { return symbols[i]; }
    int index_of(char c) const;
};

// Infinite, seeded character stream. Every record is a deterministic
// function of (seed, record index), so streams replay exactly and can be
// cloned for parallel sweeps.
class CharStream {
public:
    virtual ~CharStream() = default;
    virtual const Alphabet& alphabet() const = 0;
    virtual char next_char() = 0;
    virtual std::unique_ptr<CharStream> clone_with_seed(std::uint64_t seed) const = 0;
};

// Records "[c1..cs]r1..rk[c1..cs]\n": s random characters between
// brackets, k random characters, then the same bracketed segment again.
// Characters are uniform over an alphabet of `a` letters starting at 'a'.
class DistantBracketsStream final : public CharStream {
public:
    DistantBracketsStream(std::size_t s, std::size_t k, std::size_t a, std::uint64_t seed);

    const Alphabet& alphabet() const override { return alphabet_; }
    char next_char() override;
    std::unique_ptr<CharStream> clone_with_seed(std::uint64_t seed) const override;

    std::string record(std::uint64_t index) const;

private:
    std::size_t s_, k_, a_;
    std::uint64_t seed_, record_idx_ = 0;
    std::string buf_;
    std::size_t pos_ = 0;
    Alphabet alphabet_;
};

// Blocks "a^n\nb^n\n" with n uniform on {kmin..kmax}.
class AnbnStream final : public CharStream {
public:
    AnbnStream(std::size_t kmin, std::size_t kmax, std::uint64_t seed);

    const Alphabet& alphabet() const override { return alphabet_; }
    char next_char() override;
    std::unique_ptr<CharStream> clone_with_seed(std::uint64_t seed) const override;

    std::string record(std::uint64_t index) const;
    std::size_t block_n(std::uint64_t index) const;

private:
    std::size_t kmin_, kmax_;
    std::uint64_t seed_, record_idx_ = 0;
    std::string buf_;
    std::size_t pos_ = 0;
    Alphabet alphabet_;
};

// Wraps a character stream into next-character prediction pairs: the
// input is the current symbol, the target is the one that follows.
class PredictionStream {
public:
    explicit PredictionStream(std::unique_ptr<CharStream> chars);

    const Alphabet& alphabet() const { return chars_->alphabet(); }
    // Writes the one-hot input for the current symbol and returns the
    // target index; advances by one character.
    int next(Vec& input_one_hot);

private:
    std::unique_ptr<CharStream> chars_;
    int current_;
};

// Dumps `count` raw characters of a stream (record format as generated).
void dump_stream(CharStream& stream, std::size_t count, std::ostream& os);

// ---------------------------------------------------------------------------
// Entropy-rate oracle
// ---------------------------------------------------------------------------

// Expected optimal code length in bits per character of the a^n b^n
// stream, by exact expectation over n. A predictor "with memory" knows
// the b-run length must match the a-run; one "without memory" pays the
// run-length uncertainty twice. Forced characters cost 0 bits.
double entropy_rate_anbn(std::size_t kmin, std::size_t kmax, bool with_memory);

}  // namespace uoro
