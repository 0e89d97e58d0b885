export { SessionClient, ApiError } from './client';
export { SessionController } from './controller';
export { renderScreen } from './screens';
export * from './validation';
export * from './types';
