// Copyright 2026 The trajlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajlab/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trajlab/error.hpp"
#include "trajlab/rng.hpp"

namespace trajlab
{
namespace
{

using Json = nlohmann::ordered_json;

Json vec2_to_json(const Vec2 & v)
{
  return Json::array({v.x, v.y});
}

Vec2 vec2_from_json(const Json & j)
{
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

Json polys_to_json(const std::vector<Polygon> & polys)
{
  Json arr = Json::array();
  for (const Polygon & p : polys) {
    Json poly = Json::array();
    for (const Vec2 & v : p) {
      poly.push_back(vec2_to_json(v));
    }
    arr.push_back(std::move(poly));
  }
  return arr;
}

std::vector<Polygon> polys_from_json(const Json & j)
{
  std::vector<Polygon> out;
  for (const Json & pj : j) {
    Polygon p;
    for (const Json & vj : pj) {
      p.push_back(vec2_from_json(vj));
    }
    out.push_back(std::move(p));
  }
  return out;
}

Json sample_to_json(const Sample & s)
{
  Json j;
  j["id"] = s.sample_id;
  j["seed"] = s.rng_seed;
  j["kinematics"] = Json::array({s.kinematics[0], s.kinematics[1], s.kinematics[2]});
  Json gt = Json::array();
  for (const Vec2 & p : s.gt.points) {
    gt.push_back(vec2_to_json(p));
  }
  j["gt"] = std::move(gt);

  Json scene;
  scene["drivable"] = polys_to_json(s.scene.drivable);
  Json lanes = Json::array();
  for (const Lane & lane : s.scene.lanes) {
    Json lj;
    lj["width"] = lane.width;
    Json pts = Json::array();
    for (const Vec2 & v : lane.points) {
      pts.push_back(vec2_to_json(v));
    }
    lj["points"] = std::move(pts);
    lanes.push_back(std::move(lj));
  }
  scene["lanes"] = std::move(lanes);
  scene["ped_crossings"] = polys_to_json(s.scene.ped_crossings);
  scene["walkways"] = polys_to_json(s.scene.walkways);
  Json agents = Json::array();
  for (const AgentState & a : s.scene.agents) {
    Json aj;
    aj["position"] = vec2_to_json(a.position);
    aj["heading"] = a.heading;
    aj["half_extent"] = vec2_to_json(a.half_extent);
    aj["speed"] = a.speed;
    aj["accel"] = a.accel;
    aj["heading_rate"] = a.heading_rate;
    aj["is_target"] = a.is_target;
    agents.push_back(std::move(aj));
  }
  scene["agents"] = std::move(agents);
  j["scene"] = std::move(scene);
  return j;
}

Sample sample_from_json(const Json & j)
{
  Sample s;
  s.sample_id = j.at("id").get<std::string>();
  s.rng_seed = j.at("seed").get<std::uint64_t>();
  const Json & kin = j.at("kinematics");
  s.kinematics = {kin.at(0).get<double>(), kin.at(1).get<double>(), kin.at(2).get<double>()};
  for (const Json & pj : j.at("gt")) {
    s.gt.points.push_back(vec2_from_json(pj));
  }
  const Json & scene = j.at("scene");
  s.scene.drivable = polys_from_json(scene.at("drivable"));
  for (const Json & lj : scene.at("lanes")) {
    Lane lane;
    lane.width = lj.at("width").get<double>();
    for (const Json & vj : lj.at("points")) {
      lane.points.push_back(vec2_from_json(vj));
    }
    s.scene.lanes.push_back(std::move(lane));
  }
  s.scene.ped_crossings = polys_from_json(scene.at("ped_crossings"));
  s.scene.walkways = polys_from_json(scene.at("walkways"));
  for (const Json & aj : scene.at("agents")) {
    AgentState a;
    a.position = vec2_from_json(aj.at("position"));
    a.heading = aj.at("heading").get<double>();
    a.half_extent = vec2_from_json(aj.at("half_extent"));
    a.speed = aj.at("speed").get<double>();
    a.accel = aj.at("accel").get<double>();
    a.heading_rate = aj.at("heading_rate").get<double>();
    a.is_target = aj.at("is_target").get<bool>();
    s.scene.agents.push_back(a);
  }
  return s;
}

}  // namespace

std::string dataset_to_string(const Dataset & ds)
{
  std::ostringstream out;
  Json header;
  header["format"] = kDatasetFormatTag;
  header["count"] = ds.samples.size();
  header["horizon_steps"] = ds.horizon_steps;
  header["frequency_hz"] = ds.frequency_hz;
  out << header.dump() << '\n';
  for (const Sample & s : ds.samples) {
    out << sample_to_json(s).dump() << '\n';
  }
  return out.str();
}

void write_dataset(const std::string & path, const Dataset & ds)
{
  write_file(path, dataset_to_string(ds));
}

Dataset dataset_from_string(const std::string & text)
{
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("dataset is empty");
  }
  Json header;
  try {
    header = Json::parse(line);
  } catch (const std::exception & e) {
    throw IoError(std::string("dataset header is not valid JSON: ") + e.what());
  }
  if (header.value("format", "") != kDatasetFormatTag) {
    throw IoError("dataset format tag mismatch, expected " + std::string(kDatasetFormatTag));
  }
  Dataset ds;
  ds.horizon_steps = header.at("horizon_steps").get<int>();
  ds.frequency_hz = header.at("frequency_hz").get<double>();
  const auto expected = header.at("count").get<std::size_t>();
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    try {
      ds.samples.push_back(sample_from_json(Json::parse(line)));
    } catch (const Error &) {
      throw;
    } catch (const std::exception & e) {
      throw IoError(std::string("bad sample record: ") + e.what());
    }
  }
  if (ds.samples.size() != expected) {
    throw IoError("dataset record count does not match header");
  }
  return ds;
}

Dataset read_dataset(const std::string & path)
{
  return dataset_from_string(read_file(path));
}

std::string file_hash_hex(const std::string & path)
{
  const std::string bytes = read_file(path);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
    static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
  return buf;
}

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file for reading: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string & path, const std::string & content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open file for writing: " + path);
  }
  out << content;
  if (!out) {
    throw IoError("failed writing file: " + path);
  }
}

}  // namespace trajlab
