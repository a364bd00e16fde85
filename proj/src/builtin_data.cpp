#include "fairlens/hallucination.hpp"
#include "fairlens/lexicon.hpp"

namespace fairlens {

namespace {

const char* kBuiltinLexicon = R"(# bundled gender word list
[female]
woman
female
lady
mother
girl
aunt
wife
actress
princess
waitress
sister
queen
chairwoman
policewoman
girlfriend
pregnant
daughter
she
her
hers
herself

[male]
man
male
father
gentleman
boy
uncle
husband
actor
prince
waiter
son
brother
guy
emperor
dude
cowboy
boyfriend
chairman
policeman
he
his
him
himself
)";

// 80 MSCOCO object classes plus person and bag sub-categories as distinct
// canonicals under shared parents, and a compact synonym set for common
// surface variants.
const char* kBuiltinCocoHierarchy = R"JSON({
  "synonyms": {
    "person": "person", "people": "person", "human": "person", "player": "person",
    "child": "person", "children": "person", "kid": "person", "kids": "person",
    "pedestrian": "person", "rider": "person",
    "woman": "woman", "women": "woman", "lady": "woman", "ladies": "woman",
    "man": "man", "men": "man", "guy": "man", "guys": "man", "gentleman": "man",
    "girl": "girl", "girls": "girl",
    "boy": "boy", "boys": "boy",
    "bicycle": "bicycle", "bike": "bicycle", "bicycles": "bicycle", "bikes": "bicycle",
    "car": "car", "cars": "car", "automobile": "car", "taxi": "car", "suv": "car",
    "motorcycle": "motorcycle", "motorbike": "motorcycle", "motorcycles": "motorcycle",
    "airplane": "airplane", "aeroplane": "airplane", "plane": "airplane", "planes": "airplane",
    "jet": "airplane", "aircraft": "airplane",
    "bus": "bus", "buses": "bus",
    "train": "train", "trains": "train", "locomotive": "train",
    "truck": "truck", "trucks": "truck",
    "boat": "boat", "boats": "boat", "ship": "boat", "sailboat": "boat", "canoe": "boat",
    "traffic light": "traffic light", "traffic lights": "traffic light",
    "stoplight": "traffic light",
    "fire hydrant": "fire hydrant", "hydrant": "fire hydrant",
    "stop sign": "stop sign",
    "parking meter": "parking meter",
    "bench": "bench", "benches": "bench",
    "bird": "bird", "birds": "bird",
    "cat": "cat", "cats": "cat", "kitten": "cat",
    "dog": "dog", "dogs": "dog", "puppy": "dog",
    "horse": "horse", "horses": "horse", "pony": "horse",
    "sheep": "sheep", "lamb": "sheep",
    "cow": "cow", "cows": "cow", "cattle": "cow", "bull": "cow", "calf": "cow",
    "elephant": "elephant", "elephants": "elephant",
    "bear": "bear", "bears": "bear",
    "zebra": "zebra", "zebras": "zebra",
    "giraffe": "giraffe", "giraffes": "giraffe",
    "backpack": "backpack", "backpacks": "backpack", "knapsack": "backpack",
    "umbrella": "umbrella", "umbrellas": "umbrella",
    "handbag": "handbag", "handbags": "handbag",
    "purse": "purse", "purses": "purse",
    "briefcase": "briefcase", "briefcases": "briefcase",
    "bag": "bag", "bags": "bag",
    "tie": "tie", "necktie": "tie",
    "suitcase": "suitcase", "suitcases": "suitcase", "luggage": "suitcase",
    "frisbee": "frisbee",
    "skis": "skis", "ski": "skis",
    "snowboard": "snowboard", "snowboards": "snowboard",
    "sports ball": "sports ball", "ball": "sports ball", "balls": "sports ball",
    "soccer ball": "sports ball", "basketball": "sports ball", "baseball": "sports ball",
    "kite": "kite", "kites": "kite",
    "baseball bat": "baseball bat", "bat": "baseball bat",
    "baseball glove": "baseball glove", "glove": "baseball glove", "mitt": "baseball glove",
    "skateboard": "skateboard", "skateboards": "skateboard",
    "surfboard": "surfboard", "surfboards": "surfboard",
    "tennis racket": "tennis racket", "racket": "tennis racket", "racquet": "tennis racket",
    "bottle": "bottle", "bottles": "bottle",
    "wine glass": "wine glass", "wine glasses": "wine glass",
    "cup": "cup", "cups": "cup", "mug": "cup",
    "fork": "fork", "forks": "fork",
    "knife": "knife", "knives": "knife",
    "spoon": "spoon", "spoons": "spoon",
    "bowl": "bowl", "bowls": "bowl",
    "banana": "banana", "bananas": "banana",
    "apple": "apple", "apples": "apple",
    "sandwich": "sandwich", "sandwiches": "sandwich",
    "orange": "orange", "oranges": "orange",
    "broccoli": "broccoli",
    "carrot": "carrot", "carrots": "carrot",
    "hot dog": "hot dog", "hotdog": "hot dog", "hot dogs": "hot dog",
    "pizza": "pizza", "pizzas": "pizza",
    "donut": "donut", "donuts": "donut", "doughnut": "donut", "doughnuts": "donut",
    "cake": "cake", "cakes": "cake",
    "chair": "chair", "chairs": "chair",
    "couch": "couch", "sofa": "couch", "couches": "couch",
    "potted plant": "potted plant", "houseplant": "potted plant",
    "bed": "bed", "beds": "bed",
    "dining table": "dining table", "table": "dining table", "tables": "dining table",
    "desk": "dining table",
    "toilet": "toilet", "toilets": "toilet",
    "tv": "tv", "television": "tv", "televisions": "tv", "monitor": "tv",
    "laptop": "laptop", "laptops": "laptop", "computer": "laptop",
    "mouse": "mouse",
    "remote": "remote", "remote control": "remote", "remotes": "remote",
    "keyboard": "keyboard", "keyboards": "keyboard",
    "cell phone": "cell phone", "cellphone": "cell phone", "phone": "cell phone",
    "phones": "cell phone", "smartphone": "cell phone", "mobile phone": "cell phone",
    "microwave": "microwave", "microwaves": "microwave",
    "oven": "oven", "ovens": "oven", "stove": "oven",
    "toaster": "toaster",
    "sink": "sink", "sinks": "sink",
    "refrigerator": "refrigerator", "fridge": "refrigerator", "refrigerators": "refrigerator",
    "book": "book", "books": "book",
    "clock": "clock", "clocks": "clock",
    "vase": "vase", "vases": "vase",
    "scissors": "scissors",
    "teddy bear": "teddy bear", "teddy bears": "teddy bear", "teddy": "teddy bear",
    "hair drier": "hair drier", "hair dryer": "hair drier", "hairdryer": "hair drier",
    "toothbrush": "toothbrush", "toothbrushes": "toothbrush"
  },
  "parents": {
    "woman": "person",
    "man": "person",
    "girl": "person",
    "boy": "person",
    "purse": "bag",
    "briefcase": "bag",
    "handbag": "bag",
    "backpack": "bag",
    "suitcase": "bag"
  }
})JSON";

}  // namespace

const GenderLexicon& GenderLexicon::builtin() {
  static const GenderLexicon lexicon = GenderLexicon::parse(kBuiltinLexicon, "<builtin>");
  return lexicon;
}

const SynonymHierarchy& SynonymHierarchy::builtin_coco() {
  static const SynonymHierarchy hierarchy =
      SynonymHierarchy::from_json_text(kBuiltinCocoHierarchy, "<builtin>");
  return hierarchy;
}

}  // namespace fairlens
