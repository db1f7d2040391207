export * from "./api";
export * from "./ink";
export * from "./state";
export * from "./views/config";
export * from "./views/fragment";
export * from "./views/storyline";
export * from "./views/text";
