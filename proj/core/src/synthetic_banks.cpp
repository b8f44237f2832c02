// Built-in template banks for the synthetic generator.

namespace essaymrc::detail {

extern const char* const kEssayBankJson;
extern const char* const kEncyclopediaBankJson;

const char* const kEssayBankJson = R"json({
  "scenarios": [
    {"id": "tv_company", "opening": "Dear Alice,", "requirements": [
      {"id": "why_chose",
       "questions": ["explain why the TV company chose your school", "say why the TV company chose your school"],
       "answers": ["[The TV company chose our school because {tv_reason}.]", "[They chose my school because {tv_reason}.]"]},
      {"id": "who_filmed",
       "questions": ["tell her who or what they filmed", "say who or what they filmed"],
       "answers": ["[They filmed {film_subject} in the {school_place}.]", "[The cameras filmed {film_subject} all morning.]"]},
      {"id": "when_shown",
       "questions": ["say when the programme will be shown on television", "tell her when the programme will be on television"],
       "answers": ["[The programme will be shown on television {time_phrase}.]", "[You can watch the programme on TV {time_phrase}.]"]}
    ]},
    {"id": "meet_sally", "opening": "Dear Sally,", "requirements": [
      {"id": "new_time",
       "questions": ["suggest a new time to meet on Tuesday", "suggest another time to meet on Tuesday"],
       "answers": ["[Can we meet at {clock} on Tuesday instead?]", "[Let's meet at {clock} on Tuesday afternoon.]"]},
      {"id": "why_change",
       "questions": ["explain why you need to change the time", "say why you have to change the time"],
       "answers": ["[I need to change the time because {busy_reason}.]", "[I have to change our time because {busy_reason}.]"]},
      {"id": "where_meet",
       "questions": ["remind Sally where you arranged to meet", "tell Sally where you arranged to meet"],
       "answers": ["[We arranged to meet at {meeting_place}.]", "[Remember that we planned to meet at {meeting_place}.]"]}
    ]},
    {"id": "holiday", "opening": "Dear Tom,", "requirements": [
      {"id": "where_went",
       "questions": ["tell Tom where you went on holiday", "say where you went for your holiday"],
       "answers": ["[I went to {destination} for my holiday with my family.]", "[For my holiday I travelled to {destination}.]"]},
      {"id": "what_did",
       "questions": ["describe what you did there", "tell him what you did on holiday"],
       "answers": ["[Every day we {holiday_activity}.]", "[On holiday I {holiday_activity} with my cousins.]"]},
      {"id": "how_felt",
       "questions": ["explain how you felt about the holiday", "say how you felt about your holiday"],
       "answers": ["[I felt {feeling} because the holiday was {holiday_quality}.]", "[The holiday made me feel {feeling}.]"]}
    ]},
    {"id": "shopping", "opening": "Hi Jack,", "requirements": [
      {"id": "what_bought",
       "questions": ["tell Jack what you bought", "say what you bought at the market"],
       "answers": ["[I bought {purchase} at the market last week.]", "[Last weekend I bought {purchase} in town.]"]},
      {"id": "why_bought",
       "questions": ["explain why you bought it", "say why you decided to buy it"],
       "answers": ["[I bought it because {purchase_reason}.]", "[I decided to buy it because {purchase_reason}.]"]},
      {"id": "how_much",
       "questions": ["tell him how much it cost", "say how much you paid for it"],
       "answers": ["[It cost {price} but it was worth it.]", "[I paid {price} for it in the end.]"]}
    ]},
    {"id": "party", "opening": "Dear Emma,", "requirements": [
      {"id": "when_party",
       "questions": ["tell Emma when the party is", "say when your party will be"],
       "answers": ["[The party is on {weekday} at {clock}.]", "[My party will start at {clock} on {weekday}.]"]},
      {"id": "where_party",
       "questions": ["say where the party will be", "explain where your party will take place"],
       "answers": ["[The party will be at {party_place}.]", "[We are having the party at {party_place}.]"]},
      {"id": "what_bring",
       "questions": ["explain what Emma should bring", "tell her what to bring to the party"],
       "answers": ["[Please bring {bring_item} to the party.]", "[Could you bring {bring_item} with you?]"]}
    ]},
    {"id": "new_house", "opening": "Dear Grandma,", "requirements": [
      {"id": "where_house",
       "questions": ["say where your new house is", "tell her where your new home is"],
       "answers": ["[Our new house is {house_location}.]", "[The new house is {house_location}.]"]},
      {"id": "why_moved",
       "questions": ["explain why your family moved", "say why you moved house"],
       "answers": ["[We moved because {move_reason}.]", "[My family moved house because {move_reason}.]"]},
      {"id": "what_room",
       "questions": ["describe what your bedroom is like", "tell her what your new bedroom is like"],
       "answers": ["[My bedroom is {room_description}.]", "[My new bedroom is {room_description}.]"]}
    ]},
    {"id": "club", "opening": "Hi Ben,", "requirements": [
      {"id": "which_club",
       "questions": ["tell Ben which club you joined", "say which club you have joined"],
       "answers": ["[I joined the {club} club at school last month.]", "[Last month I joined the {club} club.]"]},
      {"id": "why_joined",
       "questions": ["explain why you joined it", "say why you chose this club"],
       "answers": ["[I chose it because {club_reason}.]", "[I joined it because {club_reason}.]"]},
      {"id": "when_meets",
       "questions": ["say when the club meets", "tell him when the club meets"],
       "answers": ["[The club meets every {weekday} after school.]", "[We meet on {weekday} evenings in the school hall.]"]}
    ]},
    {"id": "lost_item", "opening": "Dear Mr Brown,", "requirements": [
      {"id": "what_lost",
       "questions": ["tell your teacher what you lost", "say what you have lost"],
       "answers": ["[I lost my {lost_item} yesterday.]", "[Yesterday I lost my {lost_item} at school.]"]},
      {"id": "where_lost",
       "questions": ["say where you lost it", "explain where you think you left it"],
       "answers": ["[I think I left it {lost_place}.]", "[I probably lost it {lost_place}.]"]},
      {"id": "how_looks",
       "questions": ["describe what it looks like", "say what it looks like"],
       "answers": ["[It is {colour} and it has {feature}.]", "[It is a {colour} one with {feature}.]"]}
    ]}
  ],
  "slots": {
    "tv_reason": ["it has a beautiful old library", "our football team won the city cup", "our students built a small robot", "it is the oldest school in our town", "we have a famous music club", "our garden won a prize"],
    "film_subject": ["our science teacher", "the school orchestra", "some students from my class", "the head teacher", "our basketball team", "the new computer room"],
    "school_place": ["library", "main hall", "playground", "science lab", "sports hall"],
    "time_phrase": ["next Friday evening", "at eight o'clock on Sunday", "on the first of June", "some time next month", "on Channel 4 next week"],
    "clock": ["five o'clock", "half past six", "ten in the morning", "four thirty", "seven o'clock", "noon"],
    "busy_reason": ["my mother is ill", "I have a dentist appointment", "I must visit my grandfather", "my football match was moved", "I have extra maths lessons", "my cousin is arriving that day"],
    "meeting_place": ["the cafe near the station", "the entrance of the cinema", "the bus stop by the park", "the big shopping centre", "the library in town"],
    "destination": ["Japan", "the seaside in Spain", "my uncle's farm", "a small village in Italy", "the mountains in Scotland", "Paris"],
    "holiday_activity": ["swam in the sea", "went hiking in the hills", "visited old castles", "played volleyball on the beach", "ate delicious local food", "rode bikes along the river"],
    "feeling": ["really happy", "very relaxed", "a bit tired but happy", "excited", "sad to come home"],
    "holiday_quality": ["so much fun", "very relaxing", "full of surprises", "the best one ever"],
    "purchase": ["a new bike", "a red jacket", "a pair of running shoes", "a guitar", "a camera", "some old comic books"],
    "purchase_reason": ["my old one was broken", "I wanted to start a new hobby", "it was on sale", "I need it for school", "my friend recommended it"],
    "price": ["twenty pounds", "fifty euros", "thirty dollars", "almost one hundred pounds", "only ten pounds"],
    "weekday": ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"],
    "party_place": ["my house", "the community centre", "the pizza restaurant on Green Street", "my grandmother's garden", "the sports club"],
    "bring_item": ["some music", "a cake", "your swimming costume", "some drinks", "a warm coat", "your favourite game"],
    "house_location": ["near the river", "next to a big park", "in the centre of the city", "ten minutes from my school", "on a quiet street"],
    "move_reason": ["my dad got a new job", "our old flat was too small", "we wanted a garden", "my mum works in this city now", "the rent was too expensive"],
    "room_description": ["small but very bright", "painted blue and has a big window", "bigger than my old room", "quiet and comfortable", "full of posters and books"],
    "club": ["chess", "drama", "photography", "swimming", "robotics", "art"],
    "club_reason": ["my best friend is a member", "I want to make new friends", "it is very interesting", "I love learning new things", "the teacher is really kind"],
    "lost_item": ["blue pencil case", "maths book", "phone", "green scarf", "lunch box", "watch"],
    "lost_place": ["in the science room", "on the school bus", "near the football field", "in the library", "in the dining hall"],
    "colour": ["blue", "black", "bright red", "dark green", "yellow"],
    "feature": ["my name on it", "a small cat sticker", "a broken zip", "two pockets", "a silver logo"]
  },
  "fillers": [
    "I hope you are well.",
    "Thank you for your last email.",
    "It was great to hear from you.",
    "I am writing to tell you some news.",
    "My little sister says hello.",
    "The weather has been very rainy here.",
    "School is quite busy at the moment.",
    "I have a lot of homework this week.",
    "I can't wait to see you again.",
    "My parents are both fine.",
    "We got a new puppy last month.",
    "I am learning to play the piano.",
    "Our exams start soon.",
    "Everyone in my family is well.",
    "I read a great book recently.",
    "My brother started university this year."
  ],
  "closings": ["Best wishes,", "Love,", "See you soon,", "Write back soon,"]
})json";

const char* const kEncyclopediaBankJson = R"json({
  "scenarios": [
    {"id": "river", "opening": "", "requirements": [
      {"id": "country", "questions": ["Which country is the {river} in?", "In what country is the {river}?"],
       "answers": ["The {river} is a river in [{country}].", "The {river} runs through [{country}]."]},
      {"id": "length", "questions": ["How long is the {river}?", "What is the length of the {river}?"],
       "answers": ["The {river} is [{number} kilometres] long.", "It is about [{number} kilometres] long."]},
      {"id": "sea", "questions": ["What sea does the {river} flow into?", "Into which sea does the {river} flow?"],
       "answers": ["The {river} flows into [the {sea} Sea].", "It ends in [the {sea} Sea]."]},
      {"id": "city", "questions": ["What is the largest city on the {river}?", "Which city on the {river} is the largest?"],
       "answers": ["The largest city on the {river} is [{city}].", "[{city}] is the largest city on its banks."]}
    ]},
    {"id": "scientist", "opening": "", "requirements": [
      {"id": "born", "questions": ["When was {person} born?", "In what year was {person} born?"],
       "answers": ["{person} was born in [{year}].", "Born in [{year}], {person} grew up on a farm."]},
      {"id": "studied", "questions": ["What did {person} study?", "Which subject did {person} study at university?"],
       "answers": ["{person} studied [{science}] at university.", "At university {person} studied [{science}]."]},
      {"id": "prize", "questions": ["Which prize did {person} win?", "What award did {person} receive?"],
       "answers": ["Later {person} won [the {prize} Prize].", "{person} received [the {prize} Prize]."]},
      {"id": "worked", "questions": ["Where did {person} work?", "In which city did {person} work?"],
       "answers": ["{person} worked in [{city}] for many years.", "For a long time {person} worked in [{city}]."]}
    ]},
    {"id": "band", "opening": "", "requirements": [
      {"id": "formed", "questions": ["Where was {band} formed?", "In which city was {band} formed?"],
       "answers": ["{band} was formed in [{city}].", "The band {band} started in [{city}]."]},
      {"id": "album", "questions": ["What was the first album of {band}?", "What was the name of the first album by {band}?"],
       "answers": ["The first album of {band} was [{album}].", "Their first album was called [{album}]."]},
      {"id": "members", "questions": ["How many members does {band} have?", "How many people are in {band}?"],
       "answers": ["{band} has [{small_number}] members.", "The band has [{small_number}] members today."]}
    ]},
    {"id": "mountain", "opening": "", "requirements": [
      {"id": "height", "questions": ["How high is Mount {peak}?", "What is the height of Mount {peak}?"],
       "answers": ["Mount {peak} is [{number} metres] high.", "Mount {peak} rises to [{number} metres]."]},
      {"id": "climbed", "questions": ["When was Mount {peak} first climbed?", "In what year was Mount {peak} first climbed?"],
       "answers": ["Mount {peak} was first climbed in [{year}].", "The first climb of Mount {peak} was in [{year}]."]},
      {"id": "range", "questions": ["Which range is Mount {peak} part of?", "What mountain range includes Mount {peak}?"],
       "answers": ["Mount {peak} is part of the [{range} range].", "It belongs to the [{range} range]."]}
    ]}
  ],
  "slots": {
    "river": ["{n1}{n2}"], "person": ["{first} {n1}{n2}"], "band": ["The {band_word}s"], "peak": ["{n1}{n2}"],
    "n1": ["Al", "Bren", "Cor", "Dol", "Es", "Far", "Gil", "Hol", "Ith", "Jor", "Kel", "Lom"],
    "n2": ["der", "na", "rin", "wen", "sa", "mouth", "ley", "dor", "ven", "ton", "ick", "ara"],
    "first": ["Anna", "Karl", "Maria", "Pierre", "Lena", "Tomas", "Irene", "Oskar"],
    "band_word": ["Falcon", "Lantern", "Comet", "Harbour", "Velvet", "Pioneer", "Echo", "Maple"],
    "country": ["Norway", "Poland", "Chile", "Kenya", "Canada", "Peru", "Austria", "Vietnam"],
    "sea": ["North", "Baltic", "Black", "Red", "Yellow", "Coral", "Arabian"],
    "city": ["Lund", "Porto", "Gdansk", "Quito", "Tromso", "Graz", "Hue", "Mombasa"],
    "number": ["120", "340", "815", "1,020", "2,450", "3,900", "560", "97"],
    "small_number": ["three", "four", "five", "six"],
    "year": ["1821", "1867", "1902", "1935", "1954", "1978", "1860", "1911"],
    "science": ["chemistry", "physics", "botany", "geology", "astronomy", "medicine"],
    "prize": ["Nobel", "Copley", "Wolf", "Kyoto", "Abel"],
    "album": ["Blue Rooms", "Night Roads", "Paper Sky", "Silver Lines", "Open Doors"],
    "range": ["Alpine", "Andes", "Atlas", "Pamir", "Rocky"]
  },
  "fillers": [
    "Many tourists visit the area every summer.",
    "The region has a mild climate.",
    "Local newspapers often write about it.",
    "It appears on many old maps.",
    "Several books describe its history.",
    "A small museum nearby tells its story.",
    "Scholars still argue about some details.",
    "It is well known in the region."
  ],
  "closings": []
})json";

}  // namespace essaymrc::detail
