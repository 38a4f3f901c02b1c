export * from "./events";
export * from "./payload";
export * from "./viewstate";
export * from "./network";
export * from "./render";
