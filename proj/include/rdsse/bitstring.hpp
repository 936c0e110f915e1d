#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <set>

namespace rdsse::bitstring {

inline constexpr unsigned kDefaultMaskWidth = 1024;

// A mask of width y encodes one document slot per bit in [0, y-2]; bit y-1 is
// the sign bit. Deleting slot i adds 2^y - 2^i, the two's complement of the
// add-mask, so add + delete is 2^y: zero once the accumulator is read mod 2^y.

/// 2^slot. Throws kOutOfRange if slot > y-2.
mpz_class encode_add(std::uint32_t slot, unsigned width);

/// 2^y - 2^slot. Throws kOutOfRange if slot > y-2.
mpz_class encode_del(std::uint32_t slot, unsigned width);

/// Slots whose bit is set in (accumulated mod 2^y), excluding the sign bit.
/// Only meaningful for balanced add/delete sums that stayed below n.
std::set<std::uint32_t> decode(const mpz_class& accumulated, unsigned width);

/// floor((n - 2^y) / 2^y): how many masks an accumulator can absorb before
/// the sum could wrap around n. Throws kPrecondition if 2^y >= n.
mpz_class max_safe_updates(unsigned width, const mpz_class& modulus);

}  // namespace rdsse::bitstring
