#include "richtab/midi_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <string>

#include "richtab/errors.hpp"

namespace richtab {

namespace {

constexpr std::uint32_t kDefaultTempo = 500000;  // 120 BPM

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::size_t begin, std::size_t end)
      : bytes_(bytes), pos_(begin), end_(end) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= end_; }

  std::uint8_t u8() {
    if (pos_ >= end_) throw ParseError(pos_, "unexpected end of data");
    return bytes_[pos_++];
  }

  std::uint8_t peek() const {
    if (pos_ >= end_) throw ParseError(pos_, "unexpected end of data");
    return bytes_[pos_];
  }

  std::uint16_t be16() {
    std::uint16_t hi = u8();
    return static_cast<std::uint16_t>((hi << 8) | u8());
  }

  std::uint32_t be32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }

  // Variable-length quantity, at most four bytes.
  std::uint32_t vlq() {
    const std::size_t start = pos_;
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7Fu);
      if ((b & 0x80u) == 0) return v;
    }
    throw ParseError(start, "variable-length quantity longer than 4 bytes");
  }

  void skip(std::size_t n) {
    if (n > end_ - pos_) throw ParseError(pos_, "length field runs past end of chunk");
    pos_ += n;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
  std::size_t end_;
};

struct TrackData {
  std::vector<NoteEvent> notes;
  std::vector<TempoChange> tempo;
  std::vector<MeterChange> meter;
};

TrackData parse_track(std::span<const std::uint8_t> bytes, std::size_t begin, std::size_t end) {
  TrackData out;
  ByteReader r(bytes, begin, end);
  Tick now = 0;
  std::uint8_t running = 0;
  // (channel, pitch) -> onsets of sounding notes, oldest first
  std::map<std::pair<int, int>, std::vector<Tick>> sounding;

  auto close_note = [&](int channel, int pitch) {
    auto it = sounding.find({channel, pitch});
    if (it == sounding.end() || it->second.empty()) return;  // stray note-off
    Tick onset = it->second.front();
    it->second.erase(it->second.begin());
    if (now > onset) {
      NoteEvent ev;
      ev.pitch = pitch;
      ev.onset_ticks = onset;
      ev.duration_ticks = now - onset;
      out.notes.push_back(ev);
    }
  };

  while (!r.at_end()) {
    now += r.vlq();
    const std::size_t status_pos = r.pos();
    std::uint8_t status = r.peek();
    if (status < 0x80) {
      if (running == 0) throw ParseError(status_pos, "data byte without running status");
      status = running;
    } else {
      r.u8();
    }

    if (status == 0xFF) {
      running = 0;
      std::uint8_t type = r.u8();
      std::uint32_t len = r.vlq();
      const std::size_t data_pos = r.pos();
      if (type == 0x51) {
        if (len != 3) throw ParseError(data_pos, "tempo meta event must have length 3");
        std::uint32_t us = (std::uint32_t{r.u8()} << 16);
        us |= (std::uint32_t{r.u8()} << 8);
        us |= r.u8();
        if (us == 0) throw ParseError(data_pos, "zero tempo");
        out.tempo.push_back({now, us});
      } else if (type == 0x58) {
        if (len < 2) throw ParseError(data_pos, "time signature meta event too short");
        int beats = r.u8();
        int pow2 = r.u8();
        if (beats == 0 || pow2 > 6) throw ParseError(data_pos, "invalid time signature");
        out.meter.push_back({now, beats, 1 << pow2});
        r.skip(len - 2);
      } else if (type == 0x2F) {
        r.skip(len);
        break;
      } else {
        r.skip(len);
      }
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      running = 0;
      r.skip(r.vlq());
      continue;
    }
    if (status >= 0xF0) throw ParseError(status_pos, "unexpected system message in track");

    running = status;
    const int kind = status & 0xF0;
    const int channel = status & 0x0F;
    if (kind == 0xC0 || kind == 0xD0) {
      r.u8();
      continue;
    }
    std::uint8_t d1 = r.u8();
    std::uint8_t d2 = r.u8();
    if (d1 > 127 || d2 > 127) throw ParseError(r.pos() - 2, "channel message data byte >= 0x80");
    if (kind == 0x90 && d2 > 0) {
      auto& onsets = sounding[{channel, d1}];
      if (!onsets.empty()) close_note(channel, d1);  // retrigger ends the previous note
      sounding[{channel, d1}].push_back(now);
    } else if (kind == 0x80 || kind == 0x90) {
      close_note(channel, d1);
    }
  }

  // Notes still sounding at end of track end there.
  for (auto& [key, onsets] : sounding) {
    while (!onsets.empty()) close_note(key.first, key.second);
  }
  return out;
}

}  // namespace

double tick_to_seconds(Tick tick, int ppq, std::span<const TempoChange> tempo) {
  double seconds = 0.0;
  Tick last_tick = 0;
  std::uint32_t us = kDefaultTempo;
  for (const auto& change : tempo) {
    if (change.tick >= tick) break;
    seconds += static_cast<double>(change.tick - last_tick) * us / (1e6 * ppq);
    last_tick = change.tick;
    us = change.usec_per_quarter;
  }
  seconds += static_cast<double>(tick - last_tick) * us / (1e6 * ppq);
  return seconds;
}

void assign_timing(std::vector<NoteEvent>& events, int ppq, std::span<const TempoChange> tempo) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto& ev = events[i];
    ev.index = i;
    ev.onset_s = tick_to_seconds(ev.onset_ticks, ppq, tempo);
    ev.duration_s = tick_to_seconds(ev.onset_ticks + ev.duration_ticks, ppq, tempo) - ev.onset_s;
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    events[i].ioi_s = i + 1 < events.size() ? events[i + 1].onset_s - events[i].onset_s
                                            : std::numeric_limits<double>::infinity();
  }
}

MonophonyReport check_monophony(std::span<const NoteEvent> events) {
  MonophonyReport report;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Tick end = events[i].onset_ticks + events[i].duration_ticks;
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      if (events[j].onset_ticks >= end && events[j].onset_ticks != events[i].onset_ticks) break;
      report.violations.emplace_back(i, j);
    }
  }
  return report;
}

void validate_monophony(std::vector<NoteEvent>& events, OverlapPolicy policy) {
  if (policy == OverlapPolicy::Clip) {
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
      const Tick gap = events[i + 1].onset_ticks - events[i].onset_ticks;
      if (gap > 0 && events[i].duration_ticks > gap) events[i].duration_ticks = gap;
    }
  }
  auto report = check_monophony(events);
  if (!report.ok()) throw MonophonyError(std::move(report.violations));
}

Melody parse_midi(std::span<const std::uint8_t> bytes, const ParseOptions& options) {
  ByteReader header(bytes, 0, bytes.size());
  if (bytes.size() < 14) throw ParseError(0, "file too short for an MThd chunk");
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "MThd")) {
    throw ParseError(0, "missing MThd chunk id");
  }
  header.skip(4);
  const std::uint32_t header_len = header.be32();
  if (header_len < 6) throw ParseError(4, "MThd length < 6");
  Melody melody;
  melody.format = header.be16();
  header.be16();  // declared track count; the chunks themselves are authoritative
  const std::uint16_t division = header.be16();
  if (melody.format > 1) throw ParseError(8, "only SMF format 0 and 1 are supported");
  if (division & 0x8000u) throw ParseError(12, "SMPTE time division is not supported");
  if (division == 0) throw ParseError(12, "zero ticks per quarter");
  melody.ppq = division;

  std::size_t pos = 8 + static_cast<std::size_t>(header_len);
  if (pos > bytes.size()) throw ParseError(4, "MThd length runs past end of file");

  std::vector<TrackData> tracks;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 8) throw ParseError(pos, "truncated chunk header");
    ByteReader chunk(bytes, pos + 4, pos + 8);
    const std::uint32_t len = chunk.be32();
    const std::size_t body = pos + 8;
    if (len > bytes.size() - body) throw ParseError(pos + 4, "chunk length runs past end of file");
    if (std::equal(bytes.begin() + pos, bytes.begin() + pos + 4, "MTrk")) {
      tracks.push_back(parse_track(bytes, body, body + len));
    }
    pos = body + len;
  }
  if (tracks.empty()) throw ParseError(pos, "no MTrk chunk");

  for (const auto& t : tracks) {
    melody.tempo.insert(melody.tempo.end(), t.tempo.begin(), t.tempo.end());
    melody.meter.insert(melody.meter.end(), t.meter.begin(), t.meter.end());
  }
  std::stable_sort(melody.tempo.begin(), melody.tempo.end(),
                   [](const auto& a, const auto& b) { return a.tick < b.tick; });
  std::stable_sort(melody.meter.begin(), melody.meter.end(),
                   [](const auto& a, const auto& b) { return a.tick < b.tick; });
  if (melody.tempo.empty() || melody.tempo.front().tick != 0) {
    melody.tempo.insert(melody.tempo.begin(), TempoChange{0, kDefaultTempo});
  }
  if (melody.meter.empty() || melody.meter.front().tick != 0) {
    melody.meter.insert(melody.meter.begin(), MeterChange{0, 4, 4});
  }

  if (options.track) {
    if (*options.track >= tracks.size()) {
      throw EmptyMelodyError("track " + std::to_string(*options.track) + " does not exist (file has " +
                             std::to_string(tracks.size()) + " tracks)");
    }
    melody.track = *options.track;
  } else {
    auto it = std::find_if(tracks.begin(), tracks.end(),
                           [](const TrackData& t) { return !t.notes.empty(); });
    melody.track = it == tracks.end() ? 0 : static_cast<std::size_t>(it - tracks.begin());
  }
  melody.notes = std::move(tracks[melody.track].notes);
  if (melody.notes.empty()) throw EmptyMelodyError("no notes in the selected MIDI track");

  std::stable_sort(melody.notes.begin(), melody.notes.end(), [](const auto& a, const auto& b) {
    return a.onset_ticks != b.onset_ticks ? a.onset_ticks < b.onset_ticks : a.pitch < b.pitch;
  });
  validate_monophony(melody.notes, options.overlap);
  assign_timing(melody.notes, melody.ppq, melody.tempo);
  return melody;
}

Melody read_midi_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Stage::Ingest, "cannot open MIDI file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_midi(bytes, options);
}

Melody make_melody(const std::vector<std::tuple<int, Tick, Tick>>& notes, int ppq, double bpm) {
  Melody melody;
  melody.ppq = ppq;
  melody.tempo.push_back({0, static_cast<std::uint32_t>(std::lround(60e6 / bpm))});
  melody.meter.push_back({0, 4, 4});
  for (const auto& [pitch, onset, duration] : notes) {
    NoteEvent ev;
    ev.pitch = pitch;
    ev.onset_ticks = onset;
    ev.duration_ticks = duration;
    melody.notes.push_back(ev);
  }
  assign_timing(melody.notes, ppq, melody.tempo);
  return melody;
}

}  // namespace richtab
