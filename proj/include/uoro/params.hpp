#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "uoro/linalg.hpp"

namespace uoro {

// Flat trainable parameter vector with a named segment table. Every value
// belongs to exactly one block; offsets are contiguous and non-overlapping.
class ParameterVector {
public:
    struct Block {
        std::string name;
        std::size_t offset;
        std::size_t rows;
        std::size_t cols;  // cols == 1 for bias vectors

        std::size_t size() const { return rows * cols; }
    };

    ParameterVector() = default;

    std::size_t add_block(const std::string& name, std::size_t rows, std::size_t cols) {
        const std::size_t offset = values.size();
        blocks_.push_back({name, offset, rows, cols});
        values.resize(offset + rows * cols, 0.0);
        return offset;
    }

    std::size_t dim() const { return values.size(); }

    const std::vector<Block>& blocks() const { return blocks_; }

    const Block& block(const std::string& name) const {
        for (const Block& b : blocks_)
            if (b.name == name) return b;
        throw std::invalid_argument("unknown parameter block: " + name);
    }

    double* block_data(const Block& b) { return values.data() + b.offset; }
    const double* block_data(const Block& b) const { return values.data() + b.offset; }

    double& at(const Block& b, std::size_t i, std::size_t j) {
        return values[b.offset + i * b.cols + j];
    }
    double at(const Block& b, std::size_t i, std::size_t j) const {
        return values[b.offset + i * b.cols + j];
    }

    Vec values;

private:
    std::vector<Block> blocks_;
};

}  // namespace uoro
