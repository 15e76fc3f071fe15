#include "uoro/tasks.hpp"

#include <cmath>
#include <stdexcept>

#include "uoro/models/influence_balancing.hpp"

namespace uoro {

Vec influence_step(const InfluenceBalancingTask& task, const Vec& s, double theta) {
    InfluenceBalancingModel model(task.units, task.plus);
    SignRng unused(0);
    ParameterVector p = model.init_params(unused);
    p.values[0] = theta;
    return model.state_forward(Vec{}, s, p);
}

double influence_loss(const Vec& s) {
    const double d = s.at(0) - 1.0;
    return 0.5 * d * d;
}

int Alphabet::index_of(char c) const {
    const auto pos = symbols.find(c);
    if (pos == std::string::npos)
        throw std::out_of_range(std::string("symbol not in alphabet: ") + c);
    return int(pos);
}

// ---------------------------------------------------------------------------
// Distant brackets
// ---------------------------------------------------------------------------

DistantBracketsStream::DistantBracketsStream(std::size_t s, std::size_t k, std::size_t a,
                                             std::uint64_t seed)
    : s_(s), k_(k), a_(a), seed_(seed) {
    if (s < 1 || a < 2 || a > 26)
        throw std::invalid_argument("DistantBracketsStream: need s >= 1 and 2 <= a <= 26");
    for (std::size_t i = 0; i < a_; ++i) alphabet_.symbols.push_back(char('a' + i));
    alphabet_.symbols += "[]\n";
}

std::string DistantBracketsStream::record(std::uint64_t index) const {
    SignRng rng = SignRng::substream(seed_, index);
    std::string rec;
    rec.reserve(2 * s_ + k_ + 5);
    std::string inner(s_, 'a');
    for (char& c : inner) c = char('a' + rng.next_below(a_));
    rec += '[';
    rec += inner;
    rec += ']';
    for (std::size_t i = 0; i < k_; ++i) rec += char('a' + rng.next_below(a_));
    rec += '[';
    rec += inner;
    rec += ']';
    rec += '\n';
    return rec;
}

char DistantBracketsStream::next_char() {
    if (pos_ == buf_.size()) {
        buf_ = record(record_idx_++);
        pos_ = 0;
    }
    return buf_[pos_++];
}

std::unique_ptr<CharStream> DistantBracketsStream::clone_with_seed(std::uint64_t seed) const {
    return std::make_unique<DistantBracketsStream>(s_, k_, a_, seed);
}

// ---------------------------------------------------------------------------
// a^n b^n
// ---------------------------------------------------------------------------

AnbnStream::AnbnStream(std::size_t kmin, std::size_t kmax, std::uint64_t seed)
    : kmin_(kmin), kmax_(kmax), seed_(seed) {
    if (kmin < 1 || kmin > kmax)
        throw std::invalid_argument("AnbnStream: need 1 <= kmin <= kmax");
    alphabet_.symbols = "ab\n";
}

std::size_t AnbnStream::block_n(std::uint64_t index) const {
    SignRng rng = SignRng::substream(seed_, index);
    return kmin_ + std::size_t(rng.next_below(kmax_ - kmin_ + 1));
}

std::string AnbnStream::record(std::uint64_t index) const {
    const std::size_t n = block_n(index);
    std::string rec;
    rec.reserve(2 * n + 2);
    rec.append(n, 'a');
    rec += '\n';
    rec.append(n, 'b');
    rec += '\n';
    return rec;
}

char AnbnStream::next_char() {
    if (pos_ == buf_.size()) {
        buf_ = record(record_idx_++);
        pos_ = 0;
    }
    return buf_[pos_++];
}

std::unique_ptr<CharStream> AnbnStream::clone_with_seed(std::uint64_t seed) const {
    return std::make_unique<AnbnStream>(kmin_, kmax_, seed);
}

// ---------------------------------------------------------------------------
// Prediction pairs
// ---------------------------------------------------------------------------

PredictionStream::PredictionStream(std::unique_ptr<CharStream> chars)
    : chars_(std::move(chars)) {
    current_ = chars_->alphabet().index_of(chars_->next_char());
}

int PredictionStream::next(Vec& input_one_hot) {
    input_one_hot.assign(chars_->alphabet().size(), 0.0);
    input_one_hot[std::size_t(current_)] = 1.0;
    const int target = chars_->alphabet().index_of(chars_->next_char());
    current_ = target;
    return target;
}

void dump_stream(CharStream& stream, std::size_t count, std::ostream& os) {
    for (std::size_t i = 0; i < count; ++i) os.put(stream.next_char());
}

// ---------------------------------------------------------------------------
// Entropy-rate oracle
// ---------------------------------------------------------------------------

double entropy_rate_anbn(std::size_t kmin, std::size_t kmax, bool with_memory) {
    if (kmin > kmax) throw std::invalid_argument("entropy_rate_anbn: kmin > kmax");
    const double m = double(kmax - kmin + 1);
    const double log2e = 1.0 / std::log(2.0);

    // Cost in bits of one run of unknown length n: at each prefix length
    // j with kmin <= j < n the continuation is stochastic; the run ends
    // at j = n. Forced positions (j < kmin, or anything once the length
    // is known) cost nothing.
    auto run_bits = [&](std::size_t n) {
        double bits = 0.0;
        for (std::size_t j = kmin; j <= n; ++j) {
            const double stop_p = 1.0 / double(kmax - j + 1);  // P(n = j | n >= j)
            if (j == n)
                bits += -std::log(stop_p) * log2e;
            else
                bits += -std::log(1.0 - stop_p) * log2e;
        }
        return bits;
    };

    double expected_bits = 0.0;
    double expected_len = 0.0;
    for (std::size_t n = kmin; n <= kmax; ++n) {
        const double a_bits = run_bits(n);
        // With memory the b-run and both newlines are forced; without,
        // the b-run length is paid for again as a fresh draw.
        expected_bits += (with_memory ? a_bits : 2.0 * a_bits) / m;
        expected_len += double(2 * n + 2) / m;
    }
    return expected_bits / expected_len;
}

}  // namespace uoro
