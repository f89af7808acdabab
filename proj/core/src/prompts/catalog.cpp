#include <array>
#include <sstream>

#include "vthink/prompts/library.hpp"

namespace vthink::prompts {

namespace {

constexpr std::array<std::string_view, 13> kOperations = {
    "quality enhancement",     "deblurring",           "denoising",
    "inpainting",              "colorization",         "increasing saturation",
    "exposure adjustment",     "outpainting",          "zoom-in",
    "object removal",          "texture enhancement",  "novel view synthesis",
    "auxiliary line generation"};

// Task tags follow the sub-task names used by the bundled
// fixtures. Shipped verbatim as data/prompt_table.jsonl.
constexpr std::string_view kBuiltinTable = R"jsonl({"key":"quality-enhancement","family":"Enhancement","operation":"quality enhancement","template":"Enhance the overall image quality: sharpen edges, reduce noise and balance the lighting.","task_tags":["image quality assessment"]}
{"key":"deblurring","family":"Enhancement","operation":"deblurring","template":"Deblur the image and sharpen the edges of every object.","task_tags":["counting","fine-grained recognition","OCR"]}
{"key":"denoising","family":"Enhancement","operation":"denoising","template":"Denoise the image while preserving fine details and object boundaries.","task_tags":["existence","hallucination check"]}
{"key":"inpainting","family":"Enhancement","operation":"inpainting","template":"Inpaint occluded or missing regions so that partially hidden objects become complete.","task_tags":["occlusion reasoning"]}
{"key":"colorization","family":"Enhancement","operation":"colorization","template":"Colorize the image with natural, realistic tones.","task_tags":["image emotion"]}
{"key":"increasing-saturation","family":"Enhancement","operation":"increasing saturation","template":"Increase the color saturation so that object colors become vivid and distinct.","task_tags":["color recognition","attribute recognition"]}
{"key":"exposure-adjustment","family":"Enhancement","operation":"exposure adjustment","template":"Adjust the exposure to reveal details in dark and overexposed regions.","task_tags":["low-light perception","scene recognition"]}
{"key":"outpainting","family":"Expansion","operation":"outpainting","template":"Outpaint the image to extend the scene beyond its current borders.","task_tags":["landmark recognition","future prediction"]}
{"key":"zoom-in","family":"Expansion","operation":"zoom-in","template":"Zoom in on the region that matters for the question \"{question}\" and render it at higher resolution.","task_tags":["counting","OCR","chart reasoning","celebrity recognition","object localization","position"]}
{"key":"object-removal","family":"Expansion","operation":"object removal","template":"Remove distracting background objects while keeping the main subjects unchanged.","task_tags":["image topic","physical reasoning"]}
{"key":"texture-enhancement","family":"Expansion","operation":"texture enhancement","template":"Enhance surface textures and fine patterns so that materials are easier to distinguish.","task_tags":["artwork recognition","function reasoning"]}
{"key":"novel-view-synthesis","family":"Expansion","operation":"novel view synthesis","template":"Render the scene from a novel viewpoint rotated to the side, keeping the object layout consistent.","task_tags":["spatial relation","3d pose","view transformation","rotation reasoning","multi-view correspondence","depth ordering"]}
{"key":"auxiliary-line-generation","family":"Expansion","operation":"auxiliary line generation","template":"Draw auxiliary lines that outline the key shapes and connect related parts.","task_tags":["geometry reasoning","math reasoning","visual analogy","pattern induction","visual puzzle","assembly sequence"]}
)jsonl";

}  // namespace

std::span<const std::string_view> known_operations() { return kOperations; }

std::string_view builtin_table_jsonl() { return kBuiltinTable; }

const std::vector<EditPrompt>& builtin_catalog() {
  static const std::vector<EditPrompt> catalog = [] {
    std::istringstream in{std::string(kBuiltinTable)};
    return PromptLibrary::load(in).catalog();
  }();
  return catalog;
}

}  // namespace vthink::prompts
