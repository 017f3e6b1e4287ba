#include "vidiag/media/io.h"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vidiag::media {

namespace {

void put_u32le(std::string& out, uint32_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
  out.push_back(char((v >> 16) & 0xff));
  out.push_back(char((v >> 24) & 0xff));
}

void put_u16le(std::string& out, uint16_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
}

uint32_t get_u32le(const std::string& s, size_t at) {
  return uint32_t(uint8_t(s[at])) | uint32_t(uint8_t(s[at + 1])) << 8 |
         uint32_t(uint8_t(s[at + 2])) << 16 | uint32_t(uint8_t(s[at + 3])) << 24;
}

uint16_t get_u16le(const std::string& s, size_t at) {
  return uint16_t(uint8_t(s[at])) | uint16_t(uint8_t(s[at + 1])) << 8;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace

void write_y4m(const std::filesystem::path& path, const std::vector<Frame>& frames,
               int fps_num, int fps_den) {
  if (frames.empty()) throw std::runtime_error("refusing to write empty clip");
  const Frame& first = frames.front();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "YUV4MPEG2 W" << first.width << " H" << first.height << " F" << fps_num << ":"
      << fps_den << " Ip A1:1 C444\n";
  for (const auto& f : frames) {
    if (!f.valid() || !f.same_size(first))
      throw std::runtime_error("all frames must share one size");
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(f.y.data()), std::streamsize(f.y.size()));
    out.write(reinterpret_cast<const char*>(f.u.data()), std::streamsize(f.u.size()));
    out.write(reinterpret_cast<const char*>(f.v.data()), std::streamsize(f.v.size()));
  }
  if (!out) throw std::runtime_error("short write to " + path.string());
}

VideoFile read_y4m(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header) || header.rfind("YUV4MPEG2", 0) != 0)
    throw std::runtime_error("not a YUV4MPEG2 stream: " + path.string());

  int width = 0, height = 0, fps_num = 0, fps_den = 1;
  std::string colorspace = "C420";
  std::istringstream hs(header);
  std::string tok;
  hs >> tok;  // magic
  while (hs >> tok) {
    if (tok.size() < 2) continue;
    switch (tok[0]) {
      case 'W': width = std::stoi(tok.substr(1)); break;
      case 'H': height = std::stoi(tok.substr(1)); break;
      case 'F': {
        size_t colon = tok.find(':');
        fps_num = std::stoi(tok.substr(1, colon - 1));
        fps_den = colon == std::string::npos ? 1 : std::stoi(tok.substr(colon + 1));
        break;
      }
      case 'C': colorspace = tok; break;
      default: break;
    }
  }
  if (width <= 0 || height <= 0 || fps_num <= 0 || fps_den <= 0)
    throw std::runtime_error("malformed stream header: " + header);
  if (colorspace != "C444")
    throw std::runtime_error("unsupported colorspace " + colorspace + " (need C444)");

  VideoFile vf;
  vf.fps = static_cast<double>(fps_num) / fps_den;
  size_t plane = static_cast<size_t>(width) * height;
  std::string marker;
  while (std::getline(in, marker)) {
    if (marker.rfind("FRAME", 0) != 0)
      throw std::runtime_error("missing FRAME marker in " + path.string());
    Frame f;
    f.width = width;
    f.height = height;
    f.y.resize(plane);
    f.u.resize(plane);
    f.v.resize(plane);
    in.read(reinterpret_cast<char*>(f.y.data()), std::streamsize(plane));
    in.read(reinterpret_cast<char*>(f.u.data()), std::streamsize(plane));
    in.read(reinterpret_cast<char*>(f.v.data()), std::streamsize(plane));
    if (!in) throw std::runtime_error("truncated frame in " + path.string());
    vf.frames.push_back(std::move(f));
  }
  return vf;
}

void write_wav(const std::filesystem::path& path, const std::vector<double>& samples,
               int sample_rate) {
  std::string data;
  data.reserve(samples.size() * 2);
  for (double s : samples) {
    double clamped = std::clamp(s, -1.0, 1.0);
    auto v = static_cast<int16_t>(std::lround(clamped * 32767.0));
    put_u16le(data, static_cast<uint16_t>(v));
  }

  std::string out;
  out += "RIFF";
  put_u32le(out, static_cast<uint32_t>(36 + data.size()));
  out += "WAVE";
  out += "fmt ";
  put_u32le(out, 16);
  put_u16le(out, 1);  // PCM
  put_u16le(out, 1);  // mono
  put_u32le(out, static_cast<uint32_t>(sample_rate));
  put_u32le(out, static_cast<uint32_t>(sample_rate * 2));
  put_u16le(out, 2);
  put_u16le(out, 16);
  out += "data";
  put_u32le(out, static_cast<uint32_t>(data.size()));
  out += data;
  write_all(path, out);
}

AudioFile read_wav(const std::filesystem::path& path) {
  std::string bytes = read_all(path);
  if (bytes.size() < 44 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0)
    throw std::runtime_error("not a WAV file: " + path.string());

  size_t at = 12;
  int channels = 0, sample_rate = 0, bits = 0;
  size_t data_at = 0, data_size = 0;
  while (at + 8 <= bytes.size()) {
    std::string id = bytes.substr(at, 4);
    uint32_t size = get_u32le(bytes, at + 4);
    size_t body = at + 8;
    if (id == "fmt ") {
      if (body + 16 > bytes.size()) throw std::runtime_error("truncated fmt chunk");
      uint16_t format = get_u16le(bytes, body);
      if (format != 1) throw std::runtime_error("only PCM WAV is supported");
      channels = get_u16le(bytes, body + 2);
      sample_rate = static_cast<int>(get_u32le(bytes, body + 4));
      bits = get_u16le(bytes, body + 14);
    } else if (id == "data") {
      data_at = body;
      data_size = size;
    }
    at = body + size + (size & 1);
  }
  if (channels <= 0 || sample_rate <= 0 || data_at == 0)
    throw std::runtime_error("missing fmt/data chunks in " + path.string());
  if (bits != 16) throw std::runtime_error("only 16-bit WAV is supported");
  if (data_at + data_size > bytes.size()) data_size = bytes.size() - data_at;

  AudioFile af;
  af.sample_rate = sample_rate;
  size_t frames = data_size / (2 * channels);
  af.samples.reserve(frames);
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0;
    for (int c = 0; c < channels; ++c) {
      auto v = static_cast<int16_t>(get_u16le(bytes, data_at + (i * channels + c) * 2));
      acc += v / 32768.0;
    }
    af.samples.push_back(acc / channels);
  }
  return af;
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
  if (!frame.valid()) throw std::runtime_error("invalid frame");

  std::string raw;
  raw.reserve(static_cast<size_t>(frame.height) * (1 + 3 * frame.width));
  for (int yy = 0; yy < frame.height; ++yy) {
    raw.push_back('\0');  // filter type 0
    for (int xx = 0; xx < frame.width; ++xx) {
      size_t i = static_cast<size_t>(yy) * frame.width + xx;
      uint8_t r, g, b;
      yuv_to_rgb(frame.y[i], frame.u[i], frame.v[i], r, g, b);
      raw.push_back(static_cast<char>(r));
      raw.push_back(static_cast<char>(g));
      raw.push_back(static_cast<char>(b));
    }
  }

  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(compressed_size, '\0');
  if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &compressed_size,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                6) != Z_OK)
    throw std::runtime_error("deflate failed");
  compressed.resize(compressed_size);

  auto chunk = [](const char type[5], const std::string& body) {
    std::string c;
    c.push_back(char((body.size() >> 24) & 0xff));
    c.push_back(char((body.size() >> 16) & 0xff));
    c.push_back(char((body.size() >> 8) & 0xff));
    c.push_back(char(body.size() & 0xff));
    c += type;
    c += body;
    uint32_t crc = static_cast<uint32_t>(
        crc32(crc32(0L, reinterpret_cast<const Bytef*>(type), 4),
              reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
    c.push_back(char((crc >> 24) & 0xff));
    c.push_back(char((crc >> 16) & 0xff));
    c.push_back(char((crc >> 8) & 0xff));
    c.push_back(char(crc & 0xff));
    return c;
  };

  std::string ihdr;
  for (int shift = 24; shift >= 0; shift -= 8)
    ihdr.push_back(char((frame.width >> shift) & 0xff));
  for (int shift = 24; shift >= 0; shift -= 8)
    ihdr.push_back(char((frame.height >> shift) & 0xff));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // truecolor
  ihdr.push_back(0);   // deflate
  ihdr.push_back(0);   // filter method
  ihdr.push_back(0);   // no interlace

  std::string out("\x89PNG\r\n\x1a\n", 8);
  out += chunk("IHDR", ihdr);
  out += chunk("IDAT", compressed);
  out += chunk("IEND", "");
  write_all(path, out);
}

std::filesystem::path audio_sidecar_for(const std::filesystem::path& video_path) {
  std::filesystem::path p = video_path;
  p.replace_extension(".wav");
  return p;
}

}  // namespace vidiag::media
