#pragma once

// Line-oriented body files.
//   3D: header `c λ`, then `S cx cy cz r side` or `P nx ny nz d side` per ball.
//   2D: header `c λ`, then `C cx cy r side` or `L nx ny d side` per disc.
// Blank lines and lines starting with '#' are skipped. Numbers are written with 17
// significant digits so a write/read cycle reproduces every coefficient.

#include "iso2d.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace umbilic {

template <int N>
struct BodySpec {
    Curvature c{0.0};
    double lambda = 1.0;
    std::vector<UmbilicSphere<N>> balls;
};

using BodySpec3 = BodySpec<3>;
using BodySpec2 = BodySpec<2>;

namespace detail {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::vector<std::string> tokens(const std::string &line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string t; is >> t;) out.push_back(t);
    return out;
}

inline double parseNumber(const std::string &tok, std::size_t lineNo) {
    double v = 0;
    const char *first = tok.data(), *last = tok.data() + tok.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": bad number '" + tok + "'");
    return v;
}

inline int parseSide(const std::string &tok, std::size_t lineNo) {
    const double s = parseNumber(tok, lineNo);
    if (s != 1.0 && s != -1.0)
        throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": side must be 1 or -1");
    return int(s);
}

} // namespace detail

template <int N>
BodySpec<N> parseBodySpec(std::istream &in) {
    const char sphereTag = N == 3 ? 'S' : 'C';
    const char planeTag = N == 3 ? 'P' : 'L';
    BodySpec<N> spec;
    bool header = false;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto tk = detail::tokens(line);
        if (tk.empty() || tk[0][0] == '#') continue;
        if (!header) {
            if (tk.size() != 2) throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": header must be 'c lambda'");
            spec.c = Curvature(detail::parseNumber(tk[0], lineNo));
            spec.lambda = detail::parseNumber(tk[1], lineNo);
            if (!(spec.lambda > 0)) throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": lambda must be positive");
            header = true;
            continue;
        }
        if (tk[0].size() != 1 || (tk[0][0] != sphereTag && tk[0][0] != planeTag))
            throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": unknown record '" + tk[0] + "'");
        if (tk.size() != std::size_t(N + 3))
            throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": expected " + std::to_string(N + 2) + " numbers");
        Vec<N> v;
        for (int i = 0; i < N; ++i) v[i] = detail::parseNumber(tk[1 + i], lineNo);
        const double s = detail::parseNumber(tk[N + 1], lineNo);
        const int side = detail::parseSide(tk[N + 2], lineNo);
        try {
            if (tk[0][0] == sphereTag) spec.balls.emplace_back(spec.c, EuclideanSphere<N>{v, s}, side);
            else spec.balls.emplace_back(spec.c, EuclideanPlane<N>{v, s}, side);
        } catch (const GeometryError &err) {
            throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": " + err.what());
        }
    }
    if (!header) throw GeometryError(ErrorKind::Parse, "missing header");
    if (spec.balls.empty()) throw GeometryError(ErrorKind::Parse, "no balls");
    return spec;
}

template <int N>
BodySpec<N> readBodySpec(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw GeometryError(ErrorKind::Parse, "cannot open " + path);
    return parseBodySpec<N>(in);
}

template <int N>
void writeBodySpec(std::ostream &out, Curvature c, double lambda, const std::vector<UmbilicSphere<N>> &balls) {
    using detail::fmt17;
    out << fmt17(c.value()) << ' ' << fmt17(lambda) << '\n';
    for (const auto &b : balls) {
        if (const auto *s = std::get_if<EuclideanSphere<N>>(&b.shape())) {
            out << (N == 3 ? 'S' : 'C');
            for (int i = 0; i < N; ++i) out << ' ' << fmt17(s->center[i]);
            out << ' ' << fmt17(s->radius);
        } else {
            const auto &p = std::get<EuclideanPlane<N>>(b.shape());
            out << (N == 3 ? 'P' : 'L');
            for (int i = 0; i < N; ++i) out << ' ' << fmt17(p.normal[i]);
            out << ' ' << fmt17(p.offset);
        }
        out << ' ' << b.ballSide() << '\n';
    }
}

inline std::string bodySpecString(const LambdaPolyhedron &K) {
    std::ostringstream os;
    writeBodySpec<3>(os, K.c, K.lambda, K.balls);
    return os.str();
}

inline std::string bodySpecString(const LambdaPolygon &P) {
    std::ostringstream os;
    writeBodySpec<2>(os, P.c, P.lambda, P.discs);
    return os.str();
}

} // namespace umbilic
