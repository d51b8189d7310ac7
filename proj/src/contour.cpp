#include <algorithm>
#include <map>

#include "pjb/pseudospectrum.hpp"

namespace pjb {
namespace {

// Edge keys: 2 * sample + 0 for the edge to the right neighbour,
// 2 * sample + 1 for the edge to the upper neighbour.
using EdgeKey = std::size_t;

struct Segment {
  EdgeKey a;
  EdgeKey b;
};

Complex edge_point(const ResolventField& f, EdgeKey key, double level) {
  const GridSpec& g = f.grid;
  const std::size_t sample = key / 2;
  const int ix = static_cast<int>(sample % static_cast<std::size_t>(g.nx));
  const int iy = static_cast<int>(sample / static_cast<std::size_t>(g.nx));
  const bool upward = key % 2 == 1;
  const int jx = upward ? ix : ix + 1;
  const int jy = upward ? iy + 1 : iy;
  const double s0 = f.at(ix, iy);
  const double s1 = f.at(jx, jy);
  const double frac = s1 == s0 ? 0.5 : std::clamp((level - s0) / (s1 - s0), 0.0, 1.0);
  const Complex p0 = g.point(ix, iy);
  const Complex p1 = g.point(jx, jy);
  return p0 + frac * (p1 - p0);
}

std::vector<Segment> march(const ResolventField& f, double level) {
  const GridSpec& g = f.grid;
  std::vector<Segment> segments;
  for (int iy = 0; iy + 1 < g.ny; ++iy) {
    for (int ix = 0; ix + 1 < g.nx; ++ix) {
      const double v[4] = {f.at(ix, iy), f.at(ix + 1, iy), f.at(ix + 1, iy + 1), f.at(ix, iy + 1)};
      const bool in[4] = {v[0] < level, v[1] < level, v[2] < level, v[3] < level};
      // bottom, right, top, left; edge i joins corners i and i+1 (mod 4)
      const EdgeKey edge[4] = {2 * g.index(ix, iy), 2 * g.index(ix + 1, iy) + 1, 2 * g.index(ix, iy + 1),
                               2 * g.index(ix, iy) + 1};
      std::vector<int> crossed;
      for (int e = 0; e < 4; ++e) {
        if (in[e] != in[(e + 1) % 4]) crossed.push_back(e);
      }
      if (crossed.size() == 2) {
        segments.push_back({edge[crossed[0]], edge[crossed[1]]});
      } else if (crossed.size() == 4) {
        const bool center_in = 0.25 * (v[0] + v[1] + v[2] + v[3]) < level;
        if (center_in == in[0]) {
          // corners 0 and 2 connect through the centre; cut off 1 and 3
          segments.push_back({edge[0], edge[1]});
          segments.push_back({edge[2], edge[3]});
        } else {
          segments.push_back({edge[3], edge[0]});
          segments.push_back({edge[1], edge[2]});
        }
      }
    }
  }
  return segments;
}

}  // namespace

std::vector<ContourLevel> contours(const ResolventField& f, std::span<const double> levels) {
  std::vector<ContourLevel> out;
  for (double level : levels) {
    ContourLevel cl;
    cl.level = level;
    const std::vector<Segment> segments = march(f, level);

    std::map<EdgeKey, std::vector<std::size_t>> incident;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      incident[segments[i].a].push_back(i);
      incident[segments[i].b].push_back(i);
    }
    std::vector<bool> used(segments.size(), false);

    auto trace = [&](EdgeKey start) {
      std::vector<Complex> line{edge_point(f, start, level)};
      EdgeKey at = start;
      while (true) {
        std::size_t next = segments.size();
        for (std::size_t s : incident[at]) {
          if (!used[s]) {
            next = s;
            break;
          }
        }
        if (next == segments.size()) break;
        used[next] = true;
        at = segments[next].a == at ? segments[next].b : segments[next].a;
        line.push_back(edge_point(f, at, level));
        if (at == start) break;
      }
      if (line.size() > 1) cl.polylines.push_back(std::move(line));
    };

    // Open lines start at edges touched by a single segment (grid boundary).
    for (const auto& [key, segs] : incident) {
      if (segs.size() == 1 && !used[segs[0]]) trace(key);
    }
    for (const auto& [key, segs] : incident) {
      for (std::size_t s : segs) {
        if (!used[s]) trace(key);
      }
    }
    out.push_back(std::move(cl));
  }
  return out;
}

}  // namespace pjb
