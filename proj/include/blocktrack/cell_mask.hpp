#pragma once

#include "error.hpp"

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace blocktrack {

/// Fixed-size set of flat cell indices on a raster, stored as a bitset.
class CellMask {
public:
    CellMask() = default;
    explicit CellMask(std::size_t n_cells) : size_(n_cells), words_((n_cells + 63) / 64, 0) {}

    static CellMask from_cells(std::size_t n_cells, std::span<const std::uint32_t> cells)
    {
        CellMask m(n_cells);
        for (auto c : cells) {
            m.set(c);
        }
        return m;
    }

    std::size_t size() const { return size_; }

    bool test(std::size_t cell) const { return (words_[cell >> 6] >> (cell & 63)) & 1u; }

    void set(std::size_t cell, bool value = true)
    {
        if (cell >= size_) {
            throw InvalidArgument("cell index outside mask");
        }
        const std::uint64_t bit = std::uint64_t{1} << (cell & 63);
        if (value) {
            words_[cell >> 6] |= bit;
        } else {
            words_[cell >> 6] &= ~bit;
        }
    }

    std::size_t count() const
    {
        std::size_t n = 0;
        for (auto w : words_) {
            n += static_cast<std::size_t>(std::popcount(w));
        }
        return n;
    }

    bool none() const
    {
        for (auto w : words_) {
            if (w != 0) {
                return false;
            }
        }
        return true;
    }

    /// |this \ other|
    std::size_t count_outside(const CellMask& other) const
    {
        require_same_size(other);
        std::size_t n = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            n += static_cast<std::size_t>(std::popcount(words_[i] & ~other.words_[i]));
        }
        return n;
    }

    bool is_subset_of(const CellMask& other) const { return count_outside(other) == 0; }

    CellMask& operator|=(const CellMask& other)
    {
        require_same_size(other);
        for (std::size_t i = 0; i < words_.size(); ++i) {
            words_[i] |= other.words_[i];
        }
        return *this;
    }

    CellMask& operator&=(const CellMask& other)
    {
        require_same_size(other);
        for (std::size_t i = 0; i < words_.size(); ++i) {
            words_[i] &= other.words_[i];
        }
        return *this;
    }

    CellMask& operator^=(const CellMask& other)
    {
        require_same_size(other);
        for (std::size_t i = 0; i < words_.size(); ++i) {
            words_[i] ^= other.words_[i];
        }
        return *this;
    }

    /// this \ other
    CellMask minus(const CellMask& other) const
    {
        require_same_size(other);
        CellMask out = *this;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            out.words_[i] &= ~other.words_[i];
        }
        return out;
    }

    friend CellMask operator|(CellMask a, const CellMask& b) { return a |= b; }
    friend CellMask operator&(CellMask a, const CellMask& b) { return a &= b; }
    friend CellMask operator^(CellMask a, const CellMask& b) { return a ^= b; }

    std::vector<std::uint32_t> cells() const
    {
        std::vector<std::uint32_t> out;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w != 0) {
                const int bit = std::countr_zero(w);
                out.push_back(static_cast<std::uint32_t>(i * 64 + static_cast<std::size_t>(bit)));
                w &= w - 1;
            }
        }
        return out;
    }

    bool operator==(const CellMask&) const = default;

private:
    void require_same_size(const CellMask& other) const
    {
        if (other.size_ != size_) {
            throw ShapeError("cell masks live on different rasters");
        }
    }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Cells of the mask with at least one 4-neighbor outside the mask or outside
/// the raster.
inline CellMask boundary_of(const CellMask& mask, std::size_t n_lat, std::size_t n_lon)
{
    if (mask.size() != n_lat * n_lon) {
        throw ShapeError("mask size does not match raster dimensions");
    }
    CellMask out(mask.size());
    for (auto cell : mask.cells()) {
        const std::size_t r = cell / n_lon;
        const std::size_t c = cell % n_lon;
        const bool edge = r == 0 || c == 0 || r + 1 == n_lat || c + 1 == n_lon;
        if (edge || !mask.test(cell - n_lon) || !mask.test(cell + n_lon) || !mask.test(cell - 1) ||
            !mask.test(cell + 1)) {
            out.set(cell);
        }
    }
    return out;
}

} // namespace blocktrack
