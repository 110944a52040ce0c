#pragma once

// Portable matrix container: "SCMATRX1", u64 count, then per matrix
// u32 name length, name bytes, u64 rows, u64 cols and rows*cols float64
// values in column-major order. All integers and doubles are little-endian.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "../types.hpp"

namespace sconcord::io {

inline constexpr char container_magic[8] = {'S', 'C', 'M', 'A', 'T', 'R', 'X', '1'};

struct NamedMatrix {
    std::string name;
    Matrix value;
};

namespace detail {

template <typename T>
void put(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw std::runtime_error("matrix container: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace detail

inline void write_container(std::ostream& os, const std::vector<NamedMatrix>& mats) {
    os.write(container_magic, sizeof(container_magic));
    detail::put<std::uint64_t>(os, mats.size());
    for (const NamedMatrix& m : mats) {
        detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(m.name.size()));
        os.write(m.name.data(), static_cast<std::streamsize>(m.name.size()));
        detail::put<std::uint64_t>(os, static_cast<std::uint64_t>(m.value.rows()));
        detail::put<std::uint64_t>(os, static_cast<std::uint64_t>(m.value.cols()));
        // Eigen's default storage is column-major already
        for (Eigen::Index i = 0; i < m.value.size(); ++i) detail::put<double>(os, m.value.data()[i]);
    }
}

inline std::vector<NamedMatrix> read_container(std::istream& is) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, container_magic, 8) != 0)
        throw std::runtime_error("matrix container: bad magic");
    const auto count = detail::get<std::uint64_t>(is);
    std::vector<NamedMatrix> out;
    for (std::uint64_t k = 0; k < count; ++k) {
        NamedMatrix m;
        const auto len = detail::get<std::uint32_t>(is);
        m.name.resize(len);
        if (len && !is.read(m.name.data(), len)) throw std::runtime_error("matrix container: truncated name");
        const auto rows = detail::get<std::uint64_t>(is);
        const auto cols = detail::get<std::uint64_t>(is);
        if (rows > (1ull << 32) || cols > (1ull << 32)) throw std::runtime_error("matrix container: absurd dimensions");
        m.value.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index i = 0; i < m.value.size(); ++i) m.value.data()[i] = detail::get<double>(is);
        out.push_back(std::move(m));
    }
    return out;
}

inline void write_container(const std::string& path, const std::vector<NamedMatrix>& mats) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_container(os, mats);
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::vector<NamedMatrix> read_container(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    return read_container(is);
}

inline const Matrix& find_matrix(const std::vector<NamedMatrix>& mats, const std::string& name) {
    for (const NamedMatrix& m : mats)
        if (m.name == name) return m.value;
    throw std::runtime_error("matrix container: no matrix named '" + name + "'");
}

}  // namespace sconcord::io
