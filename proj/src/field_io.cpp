#include "mlfrac/field_io.hpp"

#include "mlfrac/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mlfrac {

namespace {

constexpr const char* kMagic = "MLFRAC-FIELD v1";

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void put_le(std::vector<unsigned char>& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xFFu));
}

double get_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return std::bit_cast<double>(bits);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(item);
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

void write_field(const std::filesystem::path& path, const StateField& f) {
    const auto& g = f.grid;
    std::string header = std::string(kMagic) + "; n=" + std::to_string(g.dim()) + "; m=" + std::to_string(f.m()) +
                         "; points=";
    for (int d = 0; d < g.dim(); ++d) header += (d ? "," : "") + std::to_string(g.points(d));
    header += "; extent=";
    for (int d = 0; d < g.dim(); ++d) header += (d ? "," : "") + fmt17(g.extent(d));
    header += std::string("; space=") + (f.space == Space::physical ? "physical" : "frequency") + "\n";

    std::vector<unsigned char> payload;
    payload.reserve(static_cast<std::size_t>(f.data.size()) * 16);
    for (Eigen::Index c = 0; c < f.data.cols(); ++c) {
        for (Eigen::Index p = 0; p < f.data.rows(); ++p) {
            put_le(payload, f.data(p, c).real());
            put_le(payload, f.data(p, c).imag());
        }
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    os.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (!os) throw FormatError("failed writing " + path.string());
}

StateField read_field(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open field file " + path.string());
    std::string header;
    if (!std::getline(is, header)) throw FormatError("missing header in " + path.string());

    const auto parts = split(header, ';');
    if (parts.empty() || trim(parts[0]) != kMagic) throw FormatError("not a field file: " + path.string());
    int n = -1, m = -1;
    std::vector<int> points;
    std::vector<double> extent;
    Space space = Space::physical;
    bool have_space = false;
    try {
        for (std::size_t i = 1; i < parts.size(); ++i) {
            const std::string kv = trim(parts[i]);
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw FormatError("bad header entry '" + kv + "'");
            const std::string key = kv.substr(0, eq);
            const std::string val = kv.substr(eq + 1);
            if (key == "n") {
                n = std::stoi(val);
            } else if (key == "m") {
                m = std::stoi(val);
            } else if (key == "points") {
                for (const auto& s : split(val, ',')) points.push_back(std::stoi(s));
            } else if (key == "extent") {
                for (const auto& s : split(val, ',')) extent.push_back(std::stod(s));
            } else if (key == "space") {
                if (val == "physical") {
                    space = Space::physical;
                } else if (val == "frequency") {
                    space = Space::frequency;
                } else {
                    throw FormatError("unknown space '" + val + "'");
                }
                have_space = true;
            }
        }
    } catch (const std::logic_error&) {
        throw FormatError("unparsable header in " + path.string());
    }
    if (n < 1 || m < 1 || static_cast<int>(points.size()) != n || static_cast<int>(extent.size()) != n || !have_space) {
        throw FormatError("incomplete header in " + path.string());
    }
    StateField f;
    try {
        f = StateField(SpectralGrid(extent, points), m, space);
    } catch (const DomainError& e) {
        throw FormatError(std::string("invalid grid in field header: ") + e.what());
    }
    const std::size_t bytes = static_cast<std::size_t>(f.data.size()) * 16;
    std::vector<unsigned char> payload(bytes);
    is.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(is.gcount()) != bytes) throw FormatError("truncated payload in " + path.string());
    if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in " + path.string());
    const unsigned char* p = payload.data();
    for (Eigen::Index c = 0; c < f.data.cols(); ++c) {
        for (Eigen::Index i = 0; i < f.data.rows(); ++i) {
            f.data(i, c) = cplx(get_le(p), get_le(p + 8));
            p += 16;
        }
    }
    return f;
}

void write_field_csv(const std::filesystem::path& path, const StateField& f) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    const auto& g = f.grid;
    const bool phys = f.space == Space::physical;
    static const char* axes[] = {"x", "y", "z"};
    for (int d = 0; d < g.dim(); ++d) os << (d ? "," : "") << (phys ? "" : "xi_") << axes[d];
    for (int c = 0; c < f.m(); ++c) os << ",re_u" << c + 1 << ",im_u" << c + 1;
    os << "\n";
    for (std::size_t p = 0; p < g.size(); ++p) {
        const Eigen::VectorXd coord = phys ? g.x(p) : g.xi(p);
        for (int d = 0; d < g.dim(); ++d) os << (d ? "," : "") << fmt17(coord[d]);
        for (int c = 0; c < f.m(); ++c) {
            const cplx v = f.data(static_cast<Eigen::Index>(p), c);
            os << "," << fmt17(v.real()) << "," << fmt17(v.imag());
        }
        os << "\n";
    }
}

void write_gnuplot_columns(const std::filesystem::path& path, const StateField& field) {
    const StateField f = to_physical(field);
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot open " + path.string() + " for writing");
    const auto& g = f.grid;
    auto row = [&](std::size_t p) {
        const Eigen::VectorXd x = g.x(p);
        for (int d = 0; d < std::min(g.dim(), 2); ++d) os << fmt17(x[d]) << " ";
        for (int c = 0; c < f.m(); ++c) {
            const cplx v = f.data(static_cast<Eigen::Index>(p), c);
            os << fmt17(v.real()) << " " << fmt17(v.imag()) << (c + 1 < f.m() ? " " : "");
        }
        os << "\n";
    };
    if (g.dim() == 1) {
        os << "# x";
        for (int c = 0; c < f.m(); ++c) os << " re_u" << c + 1 << " im_u" << c + 1;
        os << "\n";
        for (std::size_t p = 0; p < g.size(); ++p) row(p);
        return;
    }
    os << "# x y";
    for (int c = 0; c < f.m(); ++c) os << " re_u" << c + 1 << " im_u" << c + 1;
    os << (g.dim() == 3 ? "  (slice z index " + std::to_string(g.points(2) / 2) + ")\n" : "\n");
    const std::size_t zoff = g.dim() == 3 ? static_cast<std::size_t>(g.points(2) / 2) * g.stride(2) : 0;
    for (int i = 0; i < g.points(0); ++i) {
        for (int j = 0; j < g.points(1); ++j) row(i * g.stride(0) + j * g.stride(1) + zoff);
        os << "\n";
    }
}

} // namespace mlfrac
