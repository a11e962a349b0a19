// Minimal Standard MIDI File writer for tests. Independent of the parser under test.
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace testsupport {

class TrackBuilder {
 public:
  TrackBuilder& raw(std::int64_t tick, std::vector<std::uint8_t> bytes, int order = 1) {
    events_.push_back({tick, order, seq_++, std::move(bytes)});
    return *this;
  }
  TrackBuilder& note(int pitch, std::int64_t on, std::int64_t dur, int channel = 0, bool zero_vel_off = false) {
    raw(on, {static_cast<std::uint8_t>(0x90 | channel), static_cast<std::uint8_t>(pitch), 100}, 2);
    if (zero_vel_off) {
      raw(on + dur, {static_cast<std::uint8_t>(0x90 | channel), static_cast<std::uint8_t>(pitch), 0}, 1);
    } else {
      raw(on + dur, {static_cast<std::uint8_t>(0x80 | channel), static_cast<std::uint8_t>(pitch), 64}, 1);
    }
    return *this;
  }
  TrackBuilder& tempo(std::int64_t tick, std::uint32_t usec_per_quarter) {
    return raw(tick, {0xFF, 0x51, 0x03, static_cast<std::uint8_t>(usec_per_quarter >> 16),
                      static_cast<std::uint8_t>(usec_per_quarter >> 8),
                      static_cast<std::uint8_t>(usec_per_quarter)},
               0);
  }
  TrackBuilder& meter(std::int64_t tick, int num, int den_pow2) {
    return raw(tick, {0xFF, 0x58, 0x04, static_cast<std::uint8_t>(num), static_cast<std::uint8_t>(den_pow2), 24, 8}, 0);
  }

  /// MTrk chunk. Events sorted by (tick, order, insertion); end-of-track appended.
  std::vector<std::uint8_t> chunk() const {
    auto ev = events_;
    std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) {
      return std::tie(a.tick, a.order, a.seq) < std::tie(b.tick, b.order, b.seq);
    });
    std::vector<std::uint8_t> body;
    std::int64_t now = 0;
    for (const auto& e : ev) {
      vlq(body, static_cast<std::uint32_t>(e.tick - now));
      now = e.tick;
      body.insert(body.end(), e.bytes.begin(), e.bytes.end());
    }
    vlq(body, 0);
    body.insert(body.end(), {0xFF, 0x2F, 0x00});
    std::vector<std::uint8_t> out{'M', 'T', 'r', 'k'};
    be32(out, static_cast<std::uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());
    return out;
  }

  static void vlq(std::vector<std::uint8_t>& out, std::uint32_t v) {
    std::uint8_t buf[5];
    int n = 0;
    buf[n++] = v & 0x7F;
    while (v >>= 7) buf[n++] = static_cast<std::uint8_t>((v & 0x7F) | 0x80);
    while (n) out.push_back(buf[--n]);
  }
  static void be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
  }

 private:
  struct Event {
    std::int64_t tick;
    int order;
    int seq;
    std::vector<std::uint8_t> bytes;
  };
  std::vector<Event> events_;
  int seq_ = 0;
};

inline std::vector<std::uint8_t> make_smf(int format, int ppq, const std::vector<TrackBuilder>& tracks) {
  std::vector<std::uint8_t> out{'M', 'T', 'h', 'd', 0, 0, 0, 6};
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(format));
  out.push_back(static_cast<std::uint8_t>(tracks.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(tracks.size()));
  out.push_back(static_cast<std::uint8_t>(ppq >> 8));
  out.push_back(static_cast<std::uint8_t>(ppq));
  for (const auto& t : tracks) {
    auto c = t.chunk();
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

/// Format 0 file with one track holding the notes (pitch, onset, duration) in ticks.
inline std::vector<std::uint8_t> simple_smf(const std::vector<std::tuple<int, std::int64_t, std::int64_t>>& notes,
                                            int ppq = 480, std::uint32_t usec_per_quarter = 500000) {
  TrackBuilder t;
  t.tempo(0, usec_per_quarter);
  for (const auto& [p, on, dur] : notes) t.note(p, on, dur);
  return make_smf(0, ppq, {t});
}

}  // namespace testsupport
