import type { Label } from "./api.js";

export interface CategoryButton {
  label: Label;
  key: string;
  title: string;
  description: string;
}

// The four categories, worded exactly as in the annotation guidelines.
export const CATEGORIES: CategoryButton[] = [
  {
    label: "A",
    key: "a",
    title: "Suicidal thoughts",
    description: "The author or the author's friend is at risk of suicide/distress.",
  },
  {
    label: "B",
    key: "b",
    title: "Supportive messages or helpful information",
    description:
      "The author is providing supportive messages/helpful information related to suicide/distress.",
  },
  {
    label: "C",
    key: "c",
    title: "Reaction to suicide news/movie/music",
    description: "The author is spreading/reacting/commenting to suicide news/movie/music.",
  },
  {
    label: "D",
    key: "d",
    title: "Other",
    description: "The author is using suicide/distress words to describe something else.",
  },
];
