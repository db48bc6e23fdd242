#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "relret/tensor.hpp"

namespace relret {

/// Patch-vector matrix for one image, P x D_v. Stored on disk as
/// u32 P | u32 D_v | P*D_v little-endian f32.
struct VisualFeatures {
    Tensor2D patch_vectors;
    std::string source_id;

    std::size_t patches() const { return patch_vectors.rows; }
    std::size_t dim() const { return patch_vectors.cols; }
};

struct EntitySpan {
    std::size_t start = 0;
    std::size_t end = 0; // inclusive
    std::string type;
};

/// One (sentence, subject, object, relation) example. The object is either
/// a token span or, MORE-style, an index into the visual patch rows.
struct Instance {
    std::vector<std::string> tokens;
    EntitySpan subj;
    bool obj_is_visual = false;
    EntitySpan obj;                  // valid when !obj_is_visual
    std::size_t obj_visual_index = 0;
    std::string gold_relation;
    std::string visual_id;           // empty when the instance has no image
    VisualFeatures visual;           // zero patches when unresolved/absent
    std::string instance_id;
};

VisualFeatures load_visual_features(const std::string& path, const std::string& source_id);
void save_visual_features(const std::string& path, const VisualFeatures& v);

/// Reads the JSONL corpus schema, one instance per line:
///   {"tokens":[...], "subj":{"span":[i,j],"type":"PER"},
///    "obj":{"span":[i,j],"type":"LOC"} | {"visual_index":p,"type":"MISC"},
///    "relation":"...", "visual_id":"img_0001"?}
/// With visual_dir given, features for each distinct visual_id are loaded
/// from <visual_dir>/<visual_id>.bin (missing file is an error). Without it,
/// instances whose object lives in the image are rejected. Malformed lines
/// raise errors naming the line number; instance ids carry the line number.
std::vector<Instance> load_corpus(const std::string& path,
                                  const std::string& visual_dir = "");

/// Writes instances back in the load_corpus schema.
void save_corpus(const std::string& path, const std::vector<Instance>& instances);

} // namespace relret
