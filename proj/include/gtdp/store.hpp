#pragma once

#include "gtdp/engine_r1.hpp"
#include "gtdp/engine_r3.hpp"
#include "gtdp/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <variant>

namespace gtdp {

// Table file layout, all integers little-endian:
//
//   "GTDP"                       4 bytes
//   format_version               u32   (kTableFormatVersion)
//   procedure tag                u8    (1 = R1, 3 = R3)
//   q                            u64   IEEE-754 bit pattern
//   n_top                        u64
//   4 planes, each: count u64 followed by count entries
//     R1: H (f64), G triangular (f64), choice_H (u32), choice_G (u32)
//     R3: E (f64), D (f64), choice_E (u32), choice_D (u32)
//   checksum                     u64   FNV-1a over every preceding byte
//
// 1-D planes hold n_top + 1 entries; the triangular R1 planes hold
// n_top (n_top + 1) / 2 entries, row s = m + n carrying m = 1..s.

inline constexpr std::uint32_t kTableFormatVersion = 1;

using AnyTable = std::variant<R1Table, R3Table>;

/// 64-bit FNV-1a, optionally continuing from a previous state.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t state = 0xcbf29ce484222325ULL) noexcept;

/// Writes the table to `path` through a temporary file and a rename.
void save_table(const R1Table& table, const std::filesystem::path& path);
void save_table(const R3Table& table, const std::filesystem::path& path);

/// Reads a table, failing with StoreError (naming the field) unless magic,
/// version, procedure, the exact bit pattern of q, plane lengths and the
/// checksum all match.
AnyTable load_table(const std::filesystem::path& path, double expected_q,
                    Procedure expected_procedure);
R1Table load_r1(const std::filesystem::path& path, double expected_q);
R3Table load_r3(const std::filesystem::path& path, double expected_q);

/// Where cached tables live: $GTDP_CACHE_DIR, else $XDG_CACHE_HOME/gtdp,
/// else $HOME/.cache/gtdp, else ./.gtdp-cache.
std::filesystem::path default_cache_dir();

/// File name a table of this kind is cached under. R3 tables built with the
/// n_max cap get their own name since the file does not record the flag.
std::string cache_file_name(Procedure procedure, double q, Count n_top, bool capped = false);

/// Smallest cached table in `dir` with n_top >= n, if any.
std::optional<std::filesystem::path> find_cached(const std::filesystem::path& dir,
                                                 Procedure procedure, double q, Count n,
                                                 bool capped = false);

} // namespace gtdp
