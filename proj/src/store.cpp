#include "gtdp/store.hpp"

#include "gtdp/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace gtdp {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes, std::uint64_t state) noexcept
{
    for (std::uint8_t b : bytes) {
        state ^= b;
        state *= 0x100000001b3ULL;
    }
    return state;
}

namespace {

constexpr std::array<char, 4> kMagic = {'G', 'T', 'D', 'P'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 1 + 8 + 8;

template <class T>
T to_little(T value)
{
    if constexpr (std::endian::native == std::endian::little) {
        return value;
    } else {
        auto raw = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(value);
        std::reverse(raw.begin(), raw.end());
        return std::bit_cast<T>(raw);
    }
}

std::string describe(const fs::path& path)
{
    return "'" + path.string() + "'";
}

class HashingWriter {
public:
    explicit HashingWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary)
    {
        if (!out_) throw StoreError("cannot open " + describe(path) + " for writing");
    }

    void bytes(const void* data, std::size_t size)
    {
        const auto* p = static_cast<const std::uint8_t*>(data);
        hash_ = fnv1a64({p, size}, hash_);
        out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(size));
        if (!out_) throw StoreError("write failed on " + describe(path_));
    }

    template <class T>
    void scalar(T value)
    {
        const T le = to_little(value);
        bytes(&le, sizeof le);
    }

    template <class T>
    void plane(std::span<const T> values)
    {
        scalar<std::uint64_t>(values.size());
        if constexpr (std::endian::native == std::endian::little) {
            bytes(values.data(), values.size_bytes());
        } else {
            for (T v : values) scalar(v);
        }
    }

    void finish()
    {
        const std::uint64_t digest = to_little(hash_);
        out_.write(reinterpret_cast<const char*>(&digest), sizeof digest);
        out_.close();
        if (!out_) throw StoreError("could not finish writing " + describe(path_));
    }

private:
    fs::path path_;
    std::ofstream out_;
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

template <class Table>
void write_table(const Table& table, Procedure procedure, const fs::path& path,
                 std::span<const double> values_a, std::span<const double> values_b,
                 std::span<const Choice> choices_a, std::span<const Choice> choices_b)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    fs::path temp = path;
    temp += ".tmp";
    {
        HashingWriter w(temp);
        w.bytes(kMagic.data(), kMagic.size());
        w.scalar<std::uint32_t>(kTableFormatVersion);
        w.scalar<std::uint8_t>(static_cast<std::uint8_t>(procedure));
        w.scalar<std::uint64_t>(std::bit_cast<std::uint64_t>(table.prevalence().q()));
        w.scalar<std::uint64_t>(table.n_top());
        w.plane(values_a);
        w.plane(values_b);
        w.plane(choices_a);
        w.plane(choices_b);
        w.finish();
    }
    std::error_code ec;
    fs::rename(temp, path, ec);
    if (ec) {
        fs::remove(temp, ec);
        throw StoreError("cannot move table into place at " + describe(path));
    }
}

class HashingReader {
public:
    HashingReader(const fs::path& path, std::uintmax_t size)
        : path_(path), in_(path, std::ios::binary), remaining_(size)
    {
        if (!in_) throw StoreError("cannot open " + describe(path) + " for reading");
    }

    void bytes(void* data, std::size_t size, const char* field)
    {
        if (size > remaining_) {
            throw StoreError(describe(path_) + " is truncated while reading " + field);
        }
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
        if (!in_) throw StoreError(describe(path_) + " is truncated while reading " + field);
        remaining_ -= size;
        hash_ = fnv1a64({static_cast<const std::uint8_t*>(data), size}, hash_);
    }

    template <class T>
    T scalar(const char* field)
    {
        T le;
        bytes(&le, sizeof le, field);
        return to_little(le);
    }

    template <class T>
    std::vector<T> plane(std::uint64_t expected_count, const char* field)
    {
        const auto count = scalar<std::uint64_t>(field);
        if (count != expected_count) {
            throw StoreError(describe(path_) + ": plane " + field + " holds " +
                             std::to_string(count) + " entries, expected " +
                             std::to_string(expected_count));
        }
        std::vector<T> values(count);
        bytes(values.data(), values.size() * sizeof(T), field);
        if constexpr (std::endian::native != std::endian::little) {
            for (T& v : values) v = to_little(v);
        }
        return values;
    }

    void verify_checksum()
    {
        const std::uint64_t computed = hash_;
        std::uint64_t stored_le;
        if (remaining_ != sizeof stored_le) {
            throw StoreError(describe(path_) + " has the wrong length for its header");
        }
        in_.read(reinterpret_cast<char*>(&stored_le), sizeof stored_le);
        if (!in_) throw StoreError(describe(path_) + " is truncated while reading checksum");
        if (to_little(stored_le) != computed) {
            throw StoreError(describe(path_) + ": checksum mismatch");
        }
    }

private:
    fs::path path_;
    std::ifstream in_;
    std::uintmax_t remaining_;
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::uint64_t expected_file_size(Procedure procedure, std::uint64_t n_top)
{
    const std::uint64_t line = n_top + 1;
    const std::uint64_t wide = procedure == Procedure::R1 ? n_top * (n_top + 1) / 2 : line;
    return kHeaderBytes + 4 * 8 + (line + wide) * sizeof(double) +
           (line + wide) * sizeof(Choice) + 8;
}

} // namespace

void save_table(const R1Table& table, const fs::path& path)
{
    write_table(table, Procedure::R1, path, table.binomial_plane(), table.defective_plane(),
                table.choice_binomial_plane(), table.choice_defective_plane());
}

void save_table(const R3Table& table, const fs::path& path)
{
    write_table(table, Procedure::R3, path, table.expected_plane(), table.defective_plane(),
                table.choice_binomial_plane(), table.choice_defective_plane());
}

AnyTable load_table(const fs::path& path, double expected_q, Procedure expected_procedure)
{
    std::error_code ec;
    const std::uintmax_t size = fs::file_size(path, ec);
    if (ec) throw StoreError("cannot stat " + describe(path) + ": " + ec.message());

    HashingReader r(path, size);
    std::array<char, 4> magic{};
    r.bytes(magic.data(), magic.size(), "magic");
    if (magic != kMagic) throw StoreError(describe(path) + ": bad magic, not a table file");

    const auto version = r.scalar<std::uint32_t>("format_version");
    if (version != kTableFormatVersion) {
        throw StoreError(describe(path) + ": format_version " + std::to_string(version) +
                         " is not supported (expected " + std::to_string(kTableFormatVersion) +
                         ")");
    }
    const auto tag = r.scalar<std::uint8_t>("procedure");
    if (tag != static_cast<std::uint8_t>(Procedure::R1) &&
        tag != static_cast<std::uint8_t>(Procedure::R3)) {
        throw StoreError(describe(path) + ": unknown procedure tag " + std::to_string(tag));
    }
    if (tag != static_cast<std::uint8_t>(expected_procedure)) {
        throw StoreError(describe(path) + ": procedure is " +
                         std::string(to_string(static_cast<Procedure>(tag))) + ", expected " +
                         std::string(to_string(expected_procedure)));
    }
    const auto q_bits = r.scalar<std::uint64_t>("q");
    if (q_bits != std::bit_cast<std::uint64_t>(expected_q)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << describe(path) << ": q is " << std::bit_cast<double>(q_bits) << ", expected "
            << expected_q;
        throw StoreError(msg.str());
    }
    const auto n_top = r.scalar<std::uint64_t>("n_top");
    if (n_top > (std::uint64_t{1} << 31) || expected_file_size(expected_procedure, n_top) != size) {
        throw StoreError(describe(path) + ": file length does not match n_top = " +
                         std::to_string(n_top));
    }

    const Prevalence prevalence(expected_q);
    const std::uint64_t line = n_top + 1;
    if (expected_procedure == Procedure::R1) {
        const std::uint64_t tri = R1Table::triangle_size(n_top);
        auto h = r.plane<double>(line, "H");
        auto g = r.plane<double>(tri, "G");
        auto ch = r.plane<Choice>(line, "choice_H");
        auto cg = r.plane<Choice>(tri, "choice_G");
        r.verify_checksum();
        return R1Table::from_planes(prevalence, std::move(h), std::move(g), std::move(ch),
                                    std::move(cg));
    }
    auto e = r.plane<double>(line, "E");
    auto d = r.plane<double>(line, "D");
    auto ce = r.plane<Choice>(line, "choice_E");
    auto cd = r.plane<Choice>(line, "choice_D");
    r.verify_checksum();
    return R3Table::from_planes(prevalence, std::move(e), std::move(d), std::move(ce),
                                std::move(cd));
}

R1Table load_r1(const fs::path& path, double expected_q)
{
    return std::get<R1Table>(load_table(path, expected_q, Procedure::R1));
}

R3Table load_r3(const fs::path& path, double expected_q)
{
    return std::get<R3Table>(load_table(path, expected_q, Procedure::R3));
}

fs::path default_cache_dir()
{
    if (const char* dir = std::getenv("GTDP_CACHE_DIR"); dir && *dir) return dir;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "gtdp";
    if (const char* home = std::getenv("HOME"); home && *home) {
        return fs::path(home) / ".cache" / "gtdp";
    }
    return ".gtdp-cache";
}

std::string cache_file_name(Procedure procedure, double q, Count n_top, bool capped)
{
    std::ostringstream name;
    name << to_string(procedure) << (capped ? "cap" : "") << "_q" << std::hex
         << std::bit_cast<std::uint64_t>(q) << std::dec << "_n" << n_top << ".gtdp";
    return name.str();
}

std::optional<fs::path> find_cached(const fs::path& dir, Procedure procedure, double q, Count n,
                                    bool capped)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return std::nullopt;
    const std::string prefix = cache_file_name(procedure, q, 0, capped);
    const std::string stem = prefix.substr(0, prefix.rfind("_n") + 2);
    std::optional<fs::path> best;
    Count best_n = 0;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind(stem, 0) != 0 || !name.ends_with(".gtdp")) continue;
        const std::string digits = name.substr(stem.size(), name.size() - stem.size() - 5);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) continue;
        const Count candidate = std::stoull(digits);
        if (candidate >= n && (!best || candidate < best_n)) {
            best = entry.path();
            best_n = candidate;
        }
    }
    return best;
}

} // namespace gtdp
